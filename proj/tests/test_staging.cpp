#include "iacvlab/staging.hpp"

#include "iacvlab/cashflow.hpp"
#include "iacvlab/valuation.hpp"

#include "support/generators.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace iacvlab;
using testsupport::oracle_macaulay;

TEST_SUITE("staging") {

TEST_CASE("bucket assessment") {
    StagingConfig config;
    StageState s;
    s.lifetime_pd_origination = 0.02;
    s.lifetime_pd_current = 0.02;

    SUBCASE("stable risk stays in bucket 1") {
        CHECK(assess_stage(s, config) == 1);
    }

    SUBCASE("relative threshold moves to bucket 2, boundary inclusive") {
        s.lifetime_pd_current = 0.02 * 2.5;
        CHECK(assess_stage(s, config) == 2);
        s.lifetime_pd_current = 0.02 * 2.4999;
        CHECK(assess_stage(s, config) == 1);
    }

    SUBCASE("stateless reassessment falls back to bucket 1 when the trigger clears") {
        s.lifetime_pd_current = 0.06;
        CHECK(assess_stage(s, config) == 2);
        s.lifetime_pd_current = 0.02;
        CHECK(assess_stage(s, config) == 1);
    }

    SUBCASE("days-past-due backstop") {
        s.days_past_due = 30;
        CHECK(assess_stage(s, config) == 2);
        s.dpd_presumption_rebutted = true;
        CHECK(assess_stage(s, config) == 1);
        s.dpd_presumption_rebutted = false;
        config.enable_dpd_backstop = false;
        CHECK(assess_stage(s, config) == 1);
    }

    SUBCASE("default dominates everything") {
        s.defaulted = true;
        s.days_past_due = 0;
        CHECK(assess_stage(s, config) == 3);
    }

    SUBCASE("zero origination PD against positive current PD is undefined") {
        s.lifetime_pd_origination = 0.0;
        s.lifetime_pd_current = 0.01;
        CHECK_THROWS_AS(assess_stage(s, config), std::domain_error);
        s.lifetime_pd_current = 0.0;
        CHECK(assess_stage(s, config) == 1);
    }

    SUBCASE("PDs outside [0, 1] are rejected") {
        s.lifetime_pd_current = 1.5;
        CHECK_THROWS_AS(assess_stage(s, config), std::invalid_argument);
    }
}

TEST_CASE("provision amount by bucket") {
    CHECK(provision_amount(1, 2.0, 10.0) == 2.0);
    CHECK(provision_amount(2, 2.0, 10.0) == 10.0);
    CHECK(provision_amount(3, 2.0, 10.0) == 10.0);
    CHECK_THROWS_AS(provision_amount(0, 2.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(provision_amount(1, 11.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(provision_amount(1, -1.0, 10.0), std::invalid_argument);
}

TEST_CASE("interest accrual base") {
    CHECK(accrual_base_for(1) == AccrualBase::gross_gca);
    CHECK(accrual_base_for(2) == AccrualBase::gross_gca);
    CHECK(accrual_base_for(3) == AccrualBase::net_nca);
    CHECK_THROWS_AS(accrual_base_for(4), std::invalid_argument);
}

TEST_CASE("duration") {
    SUBCASE("par bullet five years at 5%") {
        LoanContract c;
        c.id = "par";
        c.principal = 100.0;
        c.cash_flows = testsupport::make_schedule(testsupport::ScheduleKind::bullet,
                                                  100.0, 0.05, 5);
        const auto gca = gca_trajectory(c, 0.05);
        const auto gca0 = discount_to_origination(gca, 0.05);
        const DurationResult d = modified_duration(gca0, 0.05, 100.0);
        CHECK(std::abs(d.macaulay - 4.5460) <= 1e-3);
        CHECK(d.macaulay == doctest::Approx(4.5459505041623603).epsilon(1e-11));
        CHECK(d.modified == doctest::Approx(d.macaulay / 1.05).epsilon(1e-14));
    }

    SUBCASE("balance-sum form equals the flow-weighted mean payment time") {
        std::mt19937_64 rng(808);
        for (int k = 0; k < 100; ++k) {
            const auto rc = testsupport::random_contract(rng, "dur");
            const double i = solve_effective_rate(rc.contract).rate;
            const auto gca = gca_trajectory(rc.contract, i);
            const auto gca0 = discount_to_origination(gca, i);
            const double balance_form =
                modified_duration(gca0, i, rc.contract.principal).macaulay;
            const double flow_form = oracle_macaulay(rc.contract.cash_flows, i);
            CHECK(std::abs(balance_form - flow_form) <=
                  1e-9 * std::max(1.0, flow_form));
        }
    }

    SUBCASE("zero-coupon duration equals the term") {
        LoanContract c;
        c.id = "zcb";
        c.principal = 100.0;
        c.cash_flows = {0.0, 0.0, 0.0, 0.0, 100.0 * std::pow(1.04, 5.0)};
        const auto gca = gca_trajectory(c, 0.04);
        const auto gca0 = discount_to_origination(gca, 0.04);
        CHECK(modified_duration(gca0, 0.04, 100.0).macaulay ==
              doctest::Approx(5.0).epsilon(1e-12));
    }

    SUBCASE("duration_at matches the discounted form at t = 0 and shrinks over time") {
        LoanContract c;
        c.id = "at";
        c.principal = 100.0;
        c.cash_flows = testsupport::make_schedule(testsupport::ScheduleKind::annuity,
                                                  100.0, 0.06, 10);
        const auto gca = gca_trajectory(c, 0.06);
        const auto gca0 = discount_to_origination(gca, 0.06);
        const double at0 = duration_at(gca, 0.06, 0).macaulay;
        CHECK(at0 == doctest::Approx(modified_duration(gca0, 0.06, 100.0).macaulay)
                         .epsilon(1e-12));
        double previous = at0;
        for (std::size_t t = 1; t + 1 < gca.size(); ++t) {
            const double at_t = duration_at(gca, 0.06, t).macaulay;
            CHECK(at_t < previous);
            previous = at_t;
        }
    }

    SUBCASE("degenerate inputs") {
        const std::vector<double> empty;
        CHECK_THROWS_AS(modified_duration(empty, 0.05, 100.0), std::domain_error);
        const std::vector<double> series = {100.0, 50.0};
        CHECK_THROWS_AS(modified_duration(series, 0.05, 0.0), std::domain_error);
        CHECK_THROWS_AS(duration_at(series, 0.05, 5), std::invalid_argument);
    }
}

TEST_CASE("duration shock stays within the convexity bound") {
    std::mt19937_64 rng(909);
    const std::vector<double> shifts = {-0.005, -0.0025, -0.001, -0.0005,
                                        0.0005, 0.001,   0.0025, 0.005};
    for (int k = 0; k < 100; ++k) {
        const auto rc = testsupport::random_contract(rng, "shock");
        const double i = solve_effective_rate(rc.contract).rate;
        const auto gca = gca_trajectory(rc.contract, i);
        const double r = testsupport::random_risk_level(rng, i);
        const double i_ed = i - r;
        const auto shape = testsupport::random_shape(rng, rc.contract.term());
        const RiskProfile profile = normalize_profile(shape, r, gca, i_ed);
        const auto iacv = iacv_trajectory(rc.contract, profile, i_ed);
        const auto iacv0 = discount_to_origination(iacv, i_ed);
        const double principal = rc.contract.principal;
        const DurationResult d = modified_duration(iacv0, i_ed, principal);

        // Expected flows: contractual minus the projected losses.
        std::vector<double> expected(rc.contract.cash_flows.begin(),
                                     rc.contract.cash_flows.end());
        for (std::size_t t = 0; t < profile.size(); ++t) {
            expected[t] -= profile.expected_losses[t];
        }

        for (const double dr : shifts) {
            const double exact = present_value(expected, i_ed + dr);
            const double approx = shock_iacv(principal, d.modified, dr);
            const double bound = 2.0 * d.macaulay * d.macaulay * dr * dr;
            CHECK(std::abs(approx - exact) / principal <= bound);
        }
    }
}

TEST_CASE("conservatism bound and generalized delta are algebraically linked") {
    const double el0 = 2.0;
    const double gap = 0.5;
    const double d_mod = 4.0;
    const double gca0 = 100.0;
    const double bound = conservatism_bound(el0, gap, d_mod, gca0);
    // At the bound the generalized delta is exactly zero.
    CHECK(generalized_delta(bound, d_mod, gca0, el0, gap) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // At zero shift it reduces to the headroom itself.
    CHECK(generalized_delta(0.0, d_mod, gca0, el0, gap) ==
          doctest::Approx(el0 - gap).epsilon(1e-14));
    CHECK_THROWS_AS(conservatism_bound(el0, gap, 0.0, gca0), std::domain_error);
}

TEST_CASE("hidden reserve ratio at the bucket-2 trigger") {
    // Trigger after a 25% lifetime-loss increase: 80% of the lifetime
    // allowance is already funded by the hidden reserve.
    CHECK(hidden_reserve_ratio(0.25) == 0.8);
    // At a 2.5x threshold (x = 1.5): 40%.
    CHECK(hidden_reserve_ratio(1.5) == doctest::Approx(0.4).epsilon(1e-15));
    // A 6x lifetime loss (x = 5) leaves exactly one sixth pre-funded.
    CHECK(hidden_reserve_ratio(5.0) == 1.0 / 6.0);
    // Monotone decreasing in the size of the increase.
    CHECK(hidden_reserve_ratio(0.1) > hidden_reserve_ratio(0.2));
    CHECK_THROWS_AS(hidden_reserve_ratio(-1.0), std::domain_error);
}

TEST_CASE("risk drift scenario: conservative, eroded, re-secured") {
    const auto points = risk_drift_scenario({});
    REQUIRE(points.size() == 60);

    // Conservative out of the gate: allowance above the projected risk.
    for (int m = 0; m <= 3; ++m) {
        CHECK(points[static_cast<std::size_t>(m)].delta0 > 0.0);
    }
    // The drifting risk eats through the buffer while the trigger sleeps.
    for (int m = 4; m <= 17; ++m) {
        CHECK(points[static_cast<std::size_t>(m)].delta0 < 0.0);
        CHECK(points[static_cast<std::size_t>(m)].bucket == 1);
    }
    // Bucket 2 fires when the level ratio reaches 2.5x (month 18), the
    // lifetime allowance restores conservatism for the rest of the life.
    for (int m = 18; m < 60; ++m) {
        CHECK(points[static_cast<std::size_t>(m)].bucket == 2);
        CHECK(points[static_cast<std::size_t>(m)].delta0 > 0.0);
    }
    CHECK(points[17].bucket == 1);
    // The switch to lifetime EL jumps the provision.
    CHECK(points[18].provision > 3.0 * points[17].provision);
}

} // TEST_SUITE
