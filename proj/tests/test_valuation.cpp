#include "iacvlab/valuation.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace iacvlab;
using testsupport::big_pv;
using testsupport::bigfloat;
using testsupport::oracle_balances;

namespace {

LoanContract par_bullet(double principal, double coupon, std::size_t term) {
    LoanContract c;
    c.id = "bullet";
    c.principal = principal;
    c.cash_flows = testsupport::make_schedule(testsupport::ScheduleKind::bullet,
                                              principal, coupon, term);
    return c;
}

} // namespace

TEST_SUITE("valuation") {

TEST_CASE("gross carrying amount trajectory") {
    SUBCASE("par bullet stays at par until redemption") {
        const LoanContract c = par_bullet(100.0, 0.05, 5);
        const auto gca = gca_trajectory(c, 0.05);
        REQUIRE(gca.size() == 6);
        for (std::size_t t = 0; t < 5; ++t) {
            CHECK(gca[t] == doctest::Approx(100.0).epsilon(1e-12));
        }
        CHECK(std::abs(gca[5]) <= 1e-9);
    }

    SUBCASE("annuity matches the high-precision recursion") {
        LoanContract c;
        c.id = "annuity";
        c.principal = 100.0;
        c.cash_flows = testsupport::make_schedule(testsupport::ScheduleKind::annuity,
                                                  100.0, 0.05, 3);
        const auto gca = gca_trajectory(c, 0.05);
        const auto ref = oracle_balances(100.0, c.cash_flows, 0.05);
        REQUIRE(gca.size() == ref.size());
        for (std::size_t t = 0; t < gca.size(); ++t) {
            CHECK(gca[t] == doctest::Approx(ref[t]).epsilon(1e-12));
        }
        // Frozen digits for the interior points.
        CHECK(gca[1] == doctest::Approx(68.27914353687550).epsilon(1e-12));
        CHECK(gca[2] == doctest::Approx(34.97224425059477).epsilon(1e-12));
    }

    SUBCASE("a rate that does not clear the contract is rejected") {
        const LoanContract c = par_bullet(100.0, 0.05, 5);
        CHECK_THROWS_AS(gca_trajectory(c, 0.06), std::invalid_argument);
        CHECK_THROWS_AS(gca_trajectory(c, 0.04), std::invalid_argument);
    }
}

TEST_CASE("neutral profile makes the benchmark coincide with the gross amount") {
    std::mt19937_64 rng(404);
    for (int k = 0; k < 100; ++k) {
        const auto rc = testsupport::random_contract(rng, "neutral");
        const double i = solve_effective_rate(rc.contract).rate;
        const auto gca = gca_trajectory(rc.contract, i);
        const double r = testsupport::random_risk_level(rng, i);
        const RiskProfile profile = neutral_profile(gca, r);
        const auto iacv = iacv_trajectory(rc.contract, profile, i - r);
        REQUIRE(iacv.size() == gca.size());
        for (std::size_t t = 0; t < gca.size(); ++t) {
            CHECK(std::abs(gca[t] - iacv[t]) <= 1e-9 * gca[0]);
        }
    }
}

TEST_CASE("loss weights, hazards and relative profile are consistent") {
    const LoanContract c = par_bullet(200.0, 0.06, 4);
    const auto gca = gca_trajectory(c, 0.06);
    const double r = 0.01;
    const RiskProfile profile = neutral_profile(gca, r);

    const auto hz = hazard_rates(profile.expected_losses, gca);
    REQUIRE(hz.size() == 4);
    for (const double h : hz) {
        CHECK(h == doctest::Approx(r).epsilon(1e-13));
    }

    const auto rel = relative_profile(hz, r);
    for (const double p : rel) {
        CHECK(p == doctest::Approx(1.0).epsilon(1e-13));
    }

    const auto w = loss_weights(gca, 0.05);
    REQUIRE(w.size() == 4);
    for (std::size_t t = 0; t < w.size(); ++t) {
        CHECK(w[t] ==
              doctest::Approx(gca[t] / std::pow(1.05, static_cast<double>(t + 1)))
                  .epsilon(1e-13));
    }

    CHECK_THROWS_AS(relative_profile(hz, 0.0), std::domain_error);
}

TEST_CASE("profile normalization") {
    SUBCASE("frozen scale for the one-period-delayed par bullet") {
        // 5y 5% par bullet, risk level 1%: the delay concentrates the same
        // lifetime risk on four periods, so every hazard is scaled by
        // c = sum(w) / sum(shape * w) evaluated at the 4% discount rate.
        const LoanContract c = par_bullet(100.0, 0.05, 5);
        const auto gca = gca_trajectory(c, 0.05);
        const std::vector<double> shape = {0.0, 1.0, 1.0, 1.0, 1.0};
        const RiskProfile profile = normalize_profile(shape, 0.01, gca, 0.04);
        REQUIRE(profile.size() == 5);
        CHECK(profile.expected_losses[0] == 0.0);
        const auto hz = hazard_rates(profile.expected_losses, gca);
        CHECK(hz[1] == doctest::Approx(0.01 * 1.2754900453648023).epsilon(1e-10));

        // The norming makes the risk-adjusted rate exactly i - r.
        const RateSolution ra = solve_risk_adjusted_rate(c, profile.expected_losses);
        CHECK(ra.rate == doctest::Approx(0.04).epsilon(1e-11));
    }

    SUBCASE("norming identity and idempotence on random shapes") {
        std::mt19937_64 rng(505);
        for (int k = 0; k < 100; ++k) {
            const auto rc = testsupport::random_contract(rng, "norm");
            const double i = solve_effective_rate(rc.contract).rate;
            const auto gca = gca_trajectory(rc.contract, i);
            const double r = testsupport::random_risk_level(rng, i);
            const auto shape = testsupport::random_shape(rng, rc.contract.term());
            const RiskProfile profile = normalize_profile(shape, r, gca, i - r);

            const auto hz = hazard_rates(profile.expected_losses, gca);
            const auto rel = relative_profile(hz, r);
            const auto w = loss_weights(gca, i - r);
            double num = 0.0;
            double den = 0.0;
            for (std::size_t t = 0; t < w.size(); ++t) {
                num += rel[t] * w[t];
                den += w[t];
            }
            CHECK(num / den == doctest::Approx(1.0).epsilon(1e-9));

            // Re-normalizing the already-normed hazards is the identity up
            // to floating-point rounding.
            const RiskProfile again = normalize_profile(hz, r, gca, i - r);
            for (std::size_t t = 0; t < profile.size(); ++t) {
                CHECK(std::abs(again.expected_losses[t] - profile.expected_losses[t]) <=
                      1e-13 * std::max(1.0, profile.expected_losses[t]));
            }
        }
    }

    SUBCASE("input validation") {
        const LoanContract c = par_bullet(100.0, 0.05, 3);
        const auto gca = gca_trajectory(c, 0.05);
        const std::vector<double> zeros = {0.0, 0.0, 0.0};
        CHECK_THROWS_AS(normalize_profile(zeros, 0.01, gca, 0.04),
                        std::invalid_argument);
        const std::vector<double> negative = {1.0, -0.5, 1.0};
        CHECK_THROWS_AS(normalize_profile(negative, 0.01, gca, 0.04),
                        std::invalid_argument);
    }
}

TEST_CASE("gap identity: closed form equals the trajectory difference") {
    std::mt19937_64 rng(606);
    for (int k = 0; k < 100; ++k) {
        const auto rc = testsupport::random_contract(rng, "gap");
        const double i = solve_effective_rate(rc.contract).rate;
        const auto gca = gca_trajectory(rc.contract, i);
        const double r = testsupport::random_risk_level(rng, i);
        const double i_ed = i - r;
        const auto shape = testsupport::random_shape(rng, rc.contract.term());
        const RiskProfile profile = normalize_profile(shape, r, gca, i_ed);
        const auto iacv = iacv_trajectory(rc.contract, profile, i_ed);

        const auto hz = hazard_rates(profile.expected_losses, gca);
        const auto w = loss_weights(gca, i_ed);
        for (std::size_t h = 0; h <= rc.contract.term(); ++h) {
            const double formula = gca_iacv_gap(r, hz, w, h);
            const double trajectory =
                (gca[h] - iacv[h]) / std::pow(1.0 + i_ed, static_cast<double>(h));
            CHECK(std::abs(formula - trajectory) <= 1e-8 * gca[0]);
        }
    }
}

TEST_CASE("one-period-delayed profile books exactly the annualized loss as gap") {
    std::mt19937_64 rng(707);
    for (int k = 0; k < 50; ++k) {
        testsupport::CorpusOptions opt;
        opt.min_term = 2; // a delay needs at least two periods
        const auto rc = testsupport::random_contract(rng, "delay", opt);
        const double i = solve_effective_rate(rc.contract).rate;
        const auto gca = gca_trajectory(rc.contract, i);
        const double r = testsupport::random_risk_level(rng, i);
        auto shape = testsupport::random_shape(rng, rc.contract.term());
        shape[0] = 0.0; // no losses in the first period
        if (std::all_of(shape.begin() + 1, shape.end(),
                        [](double v) { return v == 0.0; })) {
            shape[1] = 1.0;
        }
        const RiskProfile profile = normalize_profile(shape, r, gca, i - r);
        const auto iacv = iacv_trajectory(rc.contract, profile, i - r);
        CHECK(std::abs((gca[1] - iacv[1]) - r * gca[0]) <= 1e-12 * gca[0]);
    }
}

TEST_CASE("conservatism delta sign convention") {
    CHECK(conservatism_delta(95.0, 94.0) == doctest::Approx(1.0));  // hidden reserve
    CHECK(conservatism_delta(95.0, 97.0) == doctest::Approx(-2.0)); // shortfall
    CHECK(risk_level(0.05, 0.04) == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("exposure trajectory assembly") {
    const LoanContract c = par_bullet(100.0, 0.05, 5);
    const auto gca_ref = gca_trajectory(c, 0.05);
    const std::vector<double> shape = {0.0, 1.0, 1.0, 1.0, 1.0};
    const RiskProfile profile = normalize_profile(shape, 0.01, gca_ref, 0.04);

    SUBCASE("rates, series and identities") {
        const ExposureTrajectory traj = build_trajectory(c, profile);
        CHECK(traj.effective.rate == doctest::Approx(0.05).epsilon(1e-11));
        CHECK(traj.risk_adjusted.rate == doctest::Approx(0.04).epsilon(1e-11));
        CHECK(traj.risk_level == doctest::Approx(0.01).epsilon(1e-9));
        REQUIRE(traj.periods() == 6);

        for (std::size_t t = 0; t < traj.periods(); ++t) {
            CHECK(traj.nca[t] ==
                  doctest::Approx(traj.gca[t] - traj.provision[t]).epsilon(1e-12));
            CHECK(traj.bucket[t] == 1);
            // Static view books the 12-month allowance.
            CHECK(traj.provision[t] == doctest::Approx(traj.el_12m[t]).epsilon(1e-12));
            // Annualized basis: r * GCA_t.
            CHECK(traj.el_12m[t] ==
                  doctest::Approx(traj.risk_level * traj.gca[t]).epsilon(1e-9));
        }

        // Lifetime EL at origination: discounted remaining losses at i.
        const double el_life_ref =
            static_cast<double>(big_pv(profile.expected_losses, bigfloat(0.05)));
        CHECK(traj.el_lifetime[0] == doctest::Approx(el_life_ref).epsilon(1e-10));
        // Losses run off, so the lifetime EL falls to zero at maturity.
        CHECK(traj.el_lifetime.back() == doctest::Approx(0.0).epsilon(1e-12));

        // Discounted series: gca0 at i, iacv0/nca0 at i_ED, delta0 difference.
        for (std::size_t t = 0; t < traj.periods(); ++t) {
            const double tt = static_cast<double>(t);
            CHECK(traj.gca0[t] ==
                  doctest::Approx(traj.gca[t] / std::pow(1.05, tt)).epsilon(1e-12));
            CHECK(traj.iacv0[t] ==
                  doctest::Approx(traj.iacv[t] / std::pow(1.04, tt)).epsilon(1e-12));
            CHECK(traj.delta0[t] ==
                  doctest::Approx(traj.iacv0[t] - traj.nca0[t]).epsilon(1e-12));
        }

        // Delayed profile: the origination delta is the full annualized
        // loss (nothing expected in year one, allowance booked anyway).
        CHECK(traj.delta0[0] == doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("next-period-loss basis discounts the coming loss") {
        TrajectoryOptions opt;
        opt.provision_basis = ProvisionBasis::next_period_loss;
        const ExposureTrajectory traj = build_trajectory(c, profile, opt);
        for (std::size_t t = 0; t + 1 < traj.periods(); ++t) {
            CHECK(traj.el_12m[t] ==
                  doctest::Approx(profile.expected_losses[t] / 1.05).epsilon(1e-12));
        }
        // Delayed profile: nothing due next period, so no allowance at t=0.
        CHECK(traj.el_12m[0] == 0.0);
    }

    SUBCASE("trailing zero flows are trimmed at full liquidation") {
        LoanContract padded;
        padded.id = "padded";
        padded.principal = 100.0;
        padded.cash_flows = testsupport::make_schedule(
            testsupport::ScheduleKind::annuity, 100.0, 0.05, 2);
        padded.cash_flows.push_back(0.0);
        padded.cash_flows.push_back(0.0);
        RiskProfile flat;
        flat.expected_losses = {0.5, 0.5, 0.0, 0.0};
        const ExposureTrajectory traj = build_trajectory(padded, flat);
        CHECK(traj.periods() == 3); // t = 0, 1, 2: liquidated after period 2
        CHECK(std::abs(traj.gca.back()) <= 1e-9);
    }

    SUBCASE("profile longer than the term is rejected") {
        RiskProfile too_long;
        too_long.expected_losses = std::vector<double>(6, 0.1);
        CHECK_THROWS_AS(build_trajectory(c, too_long), std::invalid_argument);
    }
}

TEST_CASE("discount_to_origination uses point-in-time exponents") {
    const std::vector<double> series = {100.0, 50.0, 25.0};
    const auto d = discount_to_origination(series, 0.05);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(100.0));
    CHECK(d[1] == doctest::Approx(50.0 / 1.05).epsilon(1e-14));
    CHECK(d[2] == doctest::Approx(25.0 / 1.1025).epsilon(1e-14));
}

} // TEST_SUITE
