#include "iacvlab/valuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iacvlab {

namespace {

constexpr double kTerminalTolerance = 1e-6;   // of principal
constexpr double kLiquidationTolerance = 1e-9; // of principal, series trim

std::vector<double> amortization_path(double principal,
                                      std::span<const double> flows,
                                      double rate, const char* label) {
    if (rate <= -1.0)
        throw std::domain_error("rate must be > -100%");
    std::vector<double> path(flows.size() + 1);
    path[0] = principal;
    for (std::size_t t = 0; t < flows.size(); ++t)
        path[t + 1] = (1.0 + rate) * path[t] - flows[t];
    if (std::abs(path.back()) > kTerminalTolerance * principal)
        throw std::invalid_argument(std::string(label) +
                                    ": rate does not clear the schedule, terminal value " +
                                    std::to_string(path.back()));
    return path;
}

} // namespace

void RiskProfile::validate() const {
    for (double r : expected_losses) {
        if (!std::isfinite(r))
            throw std::invalid_argument("risk profile: non-finite expected loss");
        if (r < 0.0)
            throw std::invalid_argument("risk profile: negative expected loss");
    }
}

double risk_level(double effective_rate, double risk_adjusted_rate) {
    return effective_rate - risk_adjusted_rate;
}

std::vector<double> gca_trajectory(const LoanContract& contract, double effective_rate) {
    contract.validate();
    return amortization_path(contract.principal, contract.cash_flows,
                             effective_rate, "gca_trajectory");
}

std::vector<double> iacv_trajectory(const LoanContract& contract,
                                    const RiskProfile& profile,
                                    double risk_adjusted_rate) {
    contract.validate();
    profile.validate();
    if (profile.size() > contract.term())
        throw std::invalid_argument("risk profile longer than the cash flow schedule");
    std::vector<double> expected(contract.cash_flows);
    for (std::size_t k = 0; k < profile.size(); ++k)
        expected[k] -= profile.expected_losses[k];
    return amortization_path(contract.principal, expected,
                             risk_adjusted_rate, "iacv_trajectory");
}

std::vector<double> discount_to_origination(std::span<const double> series, double rate) {
    if (rate <= -1.0)
        throw std::domain_error("rate must be > -100%");
    std::vector<double> out(series.size());
    const double inv = 1.0 / (1.0 + rate);
    double df = 1.0;
    for (std::size_t t = 0; t < series.size(); ++t) {
        out[t] = series[t] * df;
        df *= inv;
    }
    return out;
}

std::vector<double> loss_weights(std::span<const double> gca, double rate) {
    if (gca.size() < 2)
        throw std::invalid_argument("loss_weights: trajectory needs at least two points");
    if (rate <= -1.0)
        throw std::domain_error("rate must be > -100%");
    std::vector<double> w(gca.size() - 1);
    const double inv = 1.0 / (1.0 + rate);
    double df = inv;
    for (std::size_t t = 0; t + 1 < gca.size(); ++t) {
        w[t] = gca[t] * df;
        df *= inv;
    }
    return w;
}

std::vector<double> hazard_rates(std::span<const double> expected_losses,
                                 std::span<const double> gca) {
    if (gca.size() != expected_losses.size() + 1)
        throw std::invalid_argument("hazard_rates: need T losses against T + 1 balances");
    const double floor = kLiquidationTolerance * std::abs(gca.empty() ? 0.0 : gca[0]);
    std::vector<double> hz(expected_losses.size());
    for (std::size_t t = 0; t < expected_losses.size(); ++t) {
        if (std::abs(gca[t]) <= floor) {
            if (std::abs(expected_losses[t]) > floor)
                throw std::invalid_argument("hazard_rates: loss expected on zero exposure");
            hz[t] = 0.0;
        } else {
            hz[t] = expected_losses[t] / gca[t];
        }
    }
    return hz;
}

std::vector<double> relative_profile(std::span<const double> hazards, double r) {
    if (r == 0.0)
        throw std::domain_error("relative_profile: risk level is zero");
    std::vector<double> p(hazards.size());
    for (std::size_t t = 0; t < hazards.size(); ++t) p[t] = hazards[t] / r;
    return p;
}

RiskProfile neutral_profile(std::span<const double> gca, double r) {
    if (gca.size() < 2)
        throw std::invalid_argument("neutral_profile: trajectory needs at least two points");
    RiskProfile profile;
    profile.expected_losses.resize(gca.size() - 1);
    for (std::size_t t = 0; t + 1 < gca.size(); ++t)
        profile.expected_losses[t] = r * gca[t];
    return profile;
}

RiskProfile normalize_profile(std::span<const double> shape, double target_r,
                              std::span<const double> gca, double discount_rate) {
    if (gca.size() != shape.size() + 1)
        throw std::invalid_argument("normalize_profile: need T shape entries against T + 1 balances");
    if (!(target_r > 0.0))
        throw std::domain_error("normalize_profile: target risk level must be positive");
    for (double s : shape)
        if (!std::isfinite(s) || s < 0.0)
            throw std::invalid_argument("normalize_profile: shape entries must be finite and >= 0");

    const std::vector<double> w = loss_weights(gca, discount_rate);
    double total = 0.0, shaped = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        total += w[t];
        shaped += shape[t] * w[t];
    }
    if (shaped <= 0.0)
        throw std::invalid_argument("normalize_profile: shape has no mass on outstanding exposure");

    const double c = target_r * total / shaped;
    RiskProfile profile;
    profile.expected_losses.resize(shape.size());
    for (std::size_t t = 0; t < shape.size(); ++t)
        profile.expected_losses[t] = c * shape[t] * gca[t];
    return profile;
}

double gca_iacv_gap(double r, std::span<const double> hazards,
                    std::span<const double> weights, std::size_t horizon) {
    if (horizon > hazards.size() || horizon > weights.size())
        throw std::invalid_argument("gca_iacv_gap: horizon beyond the profile");
    double gap = 0.0;
    for (std::size_t t = 0; t < horizon; ++t)
        gap += (r - hazards[t]) * weights[t];
    return gap;
}

double conservatism_delta(double iacv0_t, double nca0_t) {
    return iacv0_t - nca0_t;
}

ExposureTrajectory build_trajectory(const LoanContract& contract,
                                    const RiskProfile& profile,
                                    const TrajectoryOptions& options) {
    ExposureTrajectory traj;
    traj.id = contract.id;
    traj.period_unit = contract.period_unit;
    traj.effective = solve_effective_rate(contract);
    traj.risk_adjusted = solve_risk_adjusted_rate(contract, profile.expected_losses);
    traj.risk_level = risk_level(traj.effective.rate, traj.risk_adjusted.rate);

    const double i = traj.effective.rate;
    const double i_ed = traj.risk_adjusted.rate;
    traj.gca = gca_trajectory(contract, i);
    traj.iacv = iacv_trajectory(contract, profile, i_ed);

    const std::size_t periods = traj.gca.size();   // T + 1
    std::vector<double> losses(profile.expected_losses);
    losses.resize(periods - 1, 0.0);

    traj.el_12m.assign(periods, 0.0);
    traj.el_lifetime.assign(periods, 0.0);
    for (std::size_t t = periods - 1; t-- > 0;) {
        // Remaining losses discounted at i; the loss of (t, t+1] sits one
        // period ahead of the valuation point t.
        traj.el_lifetime[t] = (traj.el_lifetime[t + 1] + losses[t]) / (1.0 + i);
        traj.el_12m[t] = options.provision_basis == ProvisionBasis::annualized_risk_level
                             ? traj.risk_level * traj.gca[t]
                             : losses[t] / (1.0 + i);
    }

    traj.bucket.assign(periods, 1);
    traj.provision.resize(periods);
    traj.nca.resize(periods);
    for (std::size_t t = 0; t < periods; ++t) {
        traj.provision[t] = traj.el_12m[t];
        traj.nca[t] = traj.gca[t] - traj.provision[t];
    }

    traj.gca0 = discount_to_origination(traj.gca, i);
    traj.iacv0 = discount_to_origination(traj.iacv, i_ed);
    traj.nca0 = discount_to_origination(traj.nca, i_ed);
    traj.delta0.resize(periods);
    for (std::size_t t = 0; t < periods; ++t)
        traj.delta0[t] = conservatism_delta(traj.iacv0[t], traj.nca0[t]);

    // Trim once the exposure is fully liquidated (padded schedules).
    const double floor = kLiquidationTolerance * contract.principal;
    for (std::size_t t = 0; t < periods; ++t) {
        if (std::abs(traj.gca[t]) <= floor) {
            const std::size_t n = t + 1;
            for (auto* s : {&traj.gca, &traj.iacv, &traj.nca, &traj.provision,
                            &traj.el_12m, &traj.el_lifetime, &traj.gca0,
                            &traj.iacv0, &traj.nca0, &traj.delta0})
                s->resize(n);
            traj.bucket.resize(n);
            break;
        }
    }
    return traj;
}

} // namespace iacvlab
