#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace iacvlab {

/// Interest accrual base by bucket: gross carrying amount in buckets 1 and
/// 2, net carrying amount once credit-impaired.
enum class AccrualBase { gross_gca, net_nca };

AccrualBase accrual_base_for(int bucket);

struct StagingConfig {
    double relative_threshold = 2.5; // lifetime PD multiple that triggers bucket 2
    int dpd_backstop = 30;           // days past due presumption
    bool enable_dpd_backstop = true;
};

struct StageState {
    int bucket = 1;
    double lifetime_pd_origination = 0.0;
    double lifetime_pd_current = 0.0;
    int days_past_due = 0;
    bool defaulted = false;
    bool dpd_presumption_rebutted = false; // per-exposure rebuttal of the dpd backstop
    double provision = 0.0;
    AccrualBase interest_accrual_base = AccrualBase::gross_gca;
};

/// Reassesses the bucket from the current state: 3 when defaulted, 2 on a
/// significant increase (PD ratio >= threshold, or the days-past-due
/// presumption unless rebutted), else 1. Stateless, so exposures fall back
/// to bucket 1 when the trigger clears. Throws std::domain_error when the
/// origination PD is zero against a positive current PD.
int assess_stage(const StageState& state, const StagingConfig& config);

/// 12-month allowance in bucket 1, lifetime allowance in buckets 2 and 3.
/// Throws std::invalid_argument when el_12m exceeds el_lifetime.
double provision_amount(int bucket, double el_12m, double el_lifetime);

struct DurationResult {
    double macaulay = 0.0;
    double modified = 0.0;
    double discount_rate = 0.0;
};

/// Macaulay duration from a discounted balance series:
/// D_Mac = sum_t series0[t] / principal, which equals the cash-flow
/// weighted mean payment time; D_mod = D_Mac / (1 + rate).
DurationResult modified_duration(std::span<const double> series0, double rate,
                                 double principal);

/// Duration of the remaining schedule seen from period t, computed on the
/// undiscounted balance series.
DurationResult duration_at(std::span<const double> series, double rate,
                           std::size_t t);

/// First-order revaluation under a risk level shift:
/// iacv0 * (1 - delta_r * d_mod).
double shock_iacv(double iacv0, double d_mod, double delta_r);

/// Largest risk level increase that keeps the carrying amount conservative:
/// (el0_t - profile_gap) / (d_mod_t * gca0_t).
double conservatism_bound(double el0_t, double profile_gap, double d_mod_t,
                          double gca0_t);

/// Conservatism gap under a risk level shift delta_r:
/// -delta_r * d_mod_t * gca0_t + (el0_t - profile_gap).
double generalized_delta(double delta_r, double d_mod_t, double gca0_t,
                         double el0_t, double profile_gap);

/// Fraction of the allowance already funded by hidden reserves when the
/// bucket-2 trigger fires after a relative lifetime-loss increase x:
/// 1 / (1 + x). Throws std::domain_error for x <= -1.
double hidden_reserve_ratio(double relative_increase_at_trigger);

/// Monthly non-amortizing loan whose risk level drifts upward until the
/// bucket-2 trigger fires; reproduces the conservative / non-conservative /
/// conservative pattern of the carrying amount against the benchmark.
struct RiskDriftConfig {
    int months = 60;
    double annual_effective_rate = 0.05;
    double annual_risk_level = 0.01;       // at origination
    double monthly_ratio_growth = 1.0 / 12.0; // level ratio grows by this per month
    double principal = 100.0;
    StagingConfig staging{};
};

struct RiskDriftPoint {
    int month = 0;
    double level_ratio = 1.0; // current / origination lifetime loss level
    double iacv = 0.0;
    double provision = 0.0;
    double nca = 0.0;
    double delta0 = 0.0;      // (iacv - nca) discounted to origination at i_ED
    int bucket = 1;
};

std::vector<RiskDriftPoint> risk_drift_scenario(const RiskDriftConfig& config = {});

} // namespace iacvlab
