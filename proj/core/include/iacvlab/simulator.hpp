#pragma once

#include "iacvlab/cashflow.hpp"
#include "iacvlab/dashboards.hpp"
#include "iacvlab/npl.hpp"
#include "iacvlab/valuation.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace iacvlab {

/// Timing of expected credit losses over the contract life.
enum class HazardShape {
    neutral,  // loss rate proportional to the outstanding amount
    delayed,  // no losses for delay_periods, uniform afterwards
    late_peak // loss mass growing quadratically towards maturity
};

enum class Amortization { level_coupon_bullet, annuity, linear };

/// One knob set drives every simulation entry point; each uses the subset
/// it needs. Rates and risk levels are per year and converted
/// geometrically when period_unit is month.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::size_t n_exposures = 1000;
    std::size_t term = 5; // contract or workout length, in periods
    PeriodUnit period_unit = PeriodUnit::year;
    Amortization amortization = Amortization::level_coupon_bullet;
    HazardShape hazard_shape = HazardShape::neutral;
    std::size_t delay_periods = 1;
    double contract_rate = 0.05;
    double risk_level = 0.01;
    double principal = 100.0;

    // Performing-book simulation.
    double pd_period = 0.0;     // 0 derives risk_level / lgd_mean per period
    double lgd_mean = 0.45;
    double lgd_half_width = 0.0;        // lgd ~ U(mean +- width)
    double ead_half_width = 0.0;        // ead ~ U(principal +- width)
    double correlation = 0.0;           // single-factor loading in [0, 1)
    double true_pd_multiple = 1.0;      // realized default probability multiple
    double ead_drift_at_default = 0.0;  // relative EAD revision on default
    double lgd_shift_at_default = 0.0;  // absolute LGD revision on default

    // Defaulted-book workout.
    std::vector<double> recovery_timing = {0.5, 0.3, 0.2}; // unsecured part
    std::vector<double> collateral_timing = {};            // empty: recovery_timing
    double collateral_fraction = 0.0;
    double lgd_unsecured = 0.45;
    double lgd_bias = 1.0;       // realized unsecured LGD multiple of the estimate
    double recovery_noise = 0.0; // multiplicative U(+-noise) on realizations
    double cure_fraction = 0.0;
    std::size_t cure_first_period = 1;
    std::size_t cure_last_period = 3;
    double method_adjustment_factor = 1.0; // one-off rescaling of unsecured estimates
    std::size_t method_adjustment_period = 0; // 0 = never

    void validate() const;

    double period_rate() const;      // contract rate per period
    double period_risk_level() const;
    double period_pd() const;
};

/// Named presets reproducing the shipped example scenarios.
ScenarioConfig figure_scenario(const std::string& name);

struct SimulatedLoan {
    LoanContract contract;
    RiskProfile profile;
    std::size_t default_period = 0; // 0 = survives to maturity, else 1..term
};

/// Book of identical-schedule contracts with the configured loss-timing
/// profile normalized to the configured risk level, plus drawn default
/// times (correlated across exposures through a single factor).
std::vector<SimulatedLoan> generate_book(const ScenarioConfig& config);

/// Snapshot roll of a performing book with defaults, workout recoveries
/// and terminal write-offs. Exposure ids persist across snapshots;
/// resolved exposures stay in the book at zero. new_default_counts[t] is
/// the number of defaults in the period ending at snapshot t + 1.
struct PortfolioSimulation {
    std::vector<PortfolioSnapshot> snapshots;
    std::vector<std::size_t> new_default_counts;
};

PortfolioSimulation simulate_portfolio(const ScenarioConfig& config,
                                       std::size_t periods);

/// Stationary per-period portfolio losses for backtesting: each period
/// draws defaults across a fixed book (no state carry-over) and sums
/// ead * lgd of the defaulted exposures. severities holds the book's
/// ead * lgd values, the weight vector for the matching null model.
struct LossSeriesSimulation {
    std::vector<double> losses;
    std::vector<std::size_t> default_counts;
    std::vector<double> severities;
};

LossSeriesSimulation simulate_loss_series(const ScenarioConfig& config,
                                          std::size_t periods);

/// Default cohort formed at date 0 and worked out to liquidation.
/// Recovery estimates are fixed at formation (realizations do not feed
/// back); lgd_bias and recovery_noise drive the realized cash.
/// expected_recoveries holds each member's formation-date schedule
/// (collateral and unsecured cash combined), whose present value at the
/// pool rate matches the decomposed net carrying amount.
struct StaticPoolSimulation {
    StaticPool pool;
    std::map<std::string, std::vector<double>> expected_recoveries;
};

StaticPoolSimulation simulate_static_pool(const ScenarioConfig& config);

/// Open defaulted book: one cohort of n_exposures enters each month and
/// works out per the config. A method_adjustment_period > 0 rescales the
/// unsecured recovery estimates of all live members once at that month.
std::vector<PoolPeriod> simulate_npl_book(const ScenarioConfig& config,
                                          std::size_t months);

} // namespace iacvlab
