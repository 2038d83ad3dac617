#pragma once

#include "iacvlab/cashflow.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace iacvlab {

/// Per-period expected credit losses. expected_losses[k] is the loss
/// expected to materialize with the cash flow of period k + 1, i.e. the
/// loss accrued on the exposure outstanding over (k, k + 1].
struct RiskProfile {
    std::vector<double> expected_losses;

    std::size_t size() const { return expected_losses.size(); }

    /// Throws std::invalid_argument on negative or non-finite entries.
    void validate() const;
};

/// Risk level r = i - i_ED: the flat per-period loss rate equivalent to
/// the whole profile (Lemma-level identity, not an approximation).
double risk_level(double effective_rate, double risk_adjusted_rate);

/// Gross carrying amount path under the effective rate: GCA_0 = principal,
/// GCA_{t+1} = (1 + i) GCA_t - CF_{t+1}. Returns T + 1 values. Throws
/// std::invalid_argument when the terminal value is outside
/// +-1e-6 * principal (the rate does not clear the contract).
std::vector<double> gca_trajectory(const LoanContract& contract, double effective_rate);

/// Benchmark path under the risk-adjusted rate on expected flows
/// CF_t - R_t. Same recursion, same terminal consistency check.
std::vector<double> iacv_trajectory(const LoanContract& contract,
                                    const RiskProfile& profile,
                                    double risk_adjusted_rate);

/// series[t] / (1 + rate)^t: point-in-time balances discounted to origination.
std::vector<double> discount_to_origination(std::span<const double> series, double rate);

/// Exposure weights for per-period loss quantities: gca[t] / (1 + rate)^(t+1)
/// for t = 0..T-1. The extra period matches the end-of-period timing of the
/// loss accrued over (t, t+1]; with these weights the gap identity below is
/// exact. Takes the full T + 1 trajectory, returns T weights.
std::vector<double> loss_weights(std::span<const double> gca, double rate);

/// Absolute risk profile r_t = R_t / GCA_t for t = 0..T-1: the loss accrued
/// over (t, t+1] relative to the exposure at the period start.
std::vector<double> hazard_rates(std::span<const double> expected_losses,
                                 std::span<const double> gca);

/// Relative risk profile p_t = r_t / r. Requires r != 0.
std::vector<double> relative_profile(std::span<const double> hazards, double r);

/// Flat profile R_t = r * GCA_t; the benchmark then coincides with the
/// gross carrying amount period by period.
RiskProfile neutral_profile(std::span<const double> gca, double r);

/// Scales a non-negative shape so the weighted mean hazard equals target_r:
/// R_t = c * shape_t * GCA_t with c chosen so that
/// sum(p_t * w_t) = sum(w_t) for w = loss_weights(gca, discount_rate).
/// Norming at discount_rate = i - target_r makes the solved risk-adjusted
/// rate exactly i - target_r.
RiskProfile normalize_profile(std::span<const double> shape, double target_r,
                              std::span<const double> gca, double discount_rate);

/// sum_{t=0}^{horizon-1} (r - r_t) * weights[t]. With weights from
/// loss_weights(gca, i_ED) this equals GCA_horizon^0 - iACV_horizon^0,
/// both discounted to origination at i_ED.
double gca_iacv_gap(double r, std::span<const double> hazards,
                    std::span<const double> weights, std::size_t horizon);

/// Hidden reserve (+) or shortfall (-) against the benchmark at one point,
/// both inputs discounted to origination at i_ED.
double conservatism_delta(double iacv0_t, double nca0_t);

/// Basis for the 12-month allowance in bucket 1.
enum class ProvisionBasis {
    annualized_risk_level,  // r * GCA_t
    next_period_loss        // R_{t+1} / (1 + i)
};

struct TrajectoryOptions {
    ProvisionBasis provision_basis = ProvisionBasis::annualized_risk_level;
};

/// Aligned per-period view of one exposure: contractual amortization,
/// benchmark value, carrying amount net of provisions, and the discounted
/// conservatism gap. All series share the same length (T + 1, trimmed at
/// full liquidation when the schedule carries trailing zero flows).
struct ExposureTrajectory {
    std::string id;
    PeriodUnit period_unit = PeriodUnit::year;
    RateSolution effective;       // i
    RateSolution risk_adjusted;   // i_ED
    double risk_level = 0.0;      // r = i - i_ED

    std::vector<double> gca;
    std::vector<double> iacv;
    std::vector<double> nca;          // gca - provision
    std::vector<double> provision;    // per bucket rule
    std::vector<double> el_12m;
    std::vector<double> el_lifetime;  // remaining R discounted at i
    std::vector<int> bucket;          // 1 in the static view

    std::vector<double> gca0;     // discounted at i
    std::vector<double> iacv0;    // discounted at i_ED
    std::vector<double> nca0;     // discounted at i_ED
    std::vector<double> delta0;   // iacv0 - nca0

    std::size_t periods() const { return gca.size(); }
};

ExposureTrajectory build_trajectory(const LoanContract& contract,
                                    const RiskProfile& profile,
                                    const TrajectoryOptions& options = {});

} // namespace iacvlab
