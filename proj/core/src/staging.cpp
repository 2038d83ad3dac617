#include "iacvlab/staging.hpp"

#include "iacvlab/cashflow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iacvlab {

AccrualBase accrual_base_for(int bucket) {
    if (bucket < 1 || bucket > 3)
        throw std::invalid_argument("bucket must be 1, 2 or 3");
    return bucket == 3 ? AccrualBase::net_nca : AccrualBase::gross_gca;
}

int assess_stage(const StageState& state, const StagingConfig& config) {
    if (state.lifetime_pd_origination < 0.0 || state.lifetime_pd_origination > 1.0 ||
        state.lifetime_pd_current < 0.0 || state.lifetime_pd_current > 1.0)
        throw std::invalid_argument("lifetime PDs must lie in [0, 1]");
    if (state.defaulted) return 3;

    if (config.enable_dpd_backstop && !state.dpd_presumption_rebutted &&
        state.days_past_due >= config.dpd_backstop)
        return 2;

    if (state.lifetime_pd_origination == 0.0) {
        if (state.lifetime_pd_current > 0.0)
            throw std::domain_error(
                "stage ratio undefined: origination lifetime PD is zero");
        return 1;
    }
    const double ratio = state.lifetime_pd_current / state.lifetime_pd_origination;
    return ratio >= config.relative_threshold ? 2 : 1;
}

double provision_amount(int bucket, double el_12m, double el_lifetime) {
    if (bucket < 1 || bucket > 3)
        throw std::invalid_argument("bucket must be 1, 2 or 3");
    if (el_12m < 0.0 || el_lifetime < 0.0)
        throw std::invalid_argument("expected losses must be >= 0");
    if (el_12m > el_lifetime)
        throw std::invalid_argument("12-month EL exceeds lifetime EL");
    return bucket == 1 ? el_12m : el_lifetime;
}

DurationResult modified_duration(std::span<const double> series0, double rate,
                                 double principal) {
    if (series0.empty())
        throw std::domain_error("duration of an empty series");
    if (!(principal > 0.0))
        throw std::domain_error("duration needs a positive principal");
    if (rate <= -1.0)
        throw std::domain_error("rate must be > -100%");
    double sum = 0.0;
    for (double v : series0) sum += v;
    DurationResult d;
    d.macaulay = sum / principal;
    d.modified = d.macaulay / (1.0 + rate);
    d.discount_rate = rate;
    return d;
}

DurationResult duration_at(std::span<const double> series, double rate,
                           std::size_t t) {
    if (t >= series.size())
        throw std::invalid_argument("duration_at: period beyond the series");
    if (!(series[t] > 0.0))
        throw std::domain_error("duration_at: balance at t must be positive");
    if (rate <= -1.0)
        throw std::domain_error("rate must be > -100%");
    const double inv = 1.0 / (1.0 + rate);
    double df = 1.0;
    double sum = 0.0;
    for (std::size_t s = t; s < series.size(); ++s) {
        sum += series[s] * df;
        df *= inv;
    }
    DurationResult d;
    d.macaulay = sum / series[t];
    d.modified = d.macaulay / (1.0 + rate);
    d.discount_rate = rate;
    return d;
}

double shock_iacv(double iacv0, double d_mod, double delta_r) {
    return iacv0 * (1.0 - delta_r * d_mod);
}

double conservatism_bound(double el0_t, double profile_gap, double d_mod_t,
                          double gca0_t) {
    const double denom = d_mod_t * gca0_t;
    if (denom == 0.0 || !std::isfinite(denom))
        throw std::domain_error("conservatism_bound: degenerate duration or exposure");
    return (el0_t - profile_gap) / denom;
}

double generalized_delta(double delta_r, double d_mod_t, double gca0_t,
                         double el0_t, double profile_gap) {
    return -delta_r * d_mod_t * gca0_t + (el0_t - profile_gap);
}

double hidden_reserve_ratio(double relative_increase_at_trigger) {
    if (relative_increase_at_trigger <= -1.0)
        throw std::domain_error("relative increase must be > -100%");
    return 1.0 / (1.0 + relative_increase_at_trigger);
}

namespace {

// sum_{k=1..n} (1 + rate)^-k
double annuity_factor(int n, double rate) {
    if (n <= 0) return 0.0;
    if (rate == 0.0) return static_cast<double>(n);
    return (1.0 - std::pow(1.0 + rate, -n)) / rate;
}

} // namespace

std::vector<RiskDriftPoint> risk_drift_scenario(const RiskDriftConfig& config) {
    if (config.months < 2)
        throw std::invalid_argument("risk_drift_scenario: need at least two months");
    if (!(config.annual_risk_level > 0.0) ||
        config.annual_risk_level >= config.annual_effective_rate)
        throw std::invalid_argument(
            "risk_drift_scenario: risk level must lie in (0, effective rate)");

    const double p = config.principal;
    const double i_m = annual_to_monthly_rate(config.annual_effective_rate);
    const double i_ed_m = annual_to_monthly_rate(config.annual_effective_rate -
                                                 config.annual_risk_level);
    const double r_m0 = i_m - i_ed_m;
    const double coupon = i_m * p;

    std::vector<RiskDriftPoint> out;
    out.reserve(config.months);
    double df0 = 1.0; // (1 + i_ed_m)^-month
    for (int t = 0; t < config.months; ++t) {
        const int remaining = config.months - t;
        RiskDriftPoint pt;
        pt.month = t;
        pt.level_ratio = 1.0 + config.monthly_ratio_growth * t;
        const double r_m = r_m0 * pt.level_ratio;

        // Benchmark: remaining contractual flows net of re-projected losses
        // (flat exposure, so the projected loss is r_m * p each month),
        // discounted at the origination risk-adjusted rate.
        std::vector<double> expected(remaining, coupon - r_m * p);
        expected.back() += p;
        pt.iacv = present_value(expected, i_ed_m, 0);

        StageState state;
        state.lifetime_pd_origination = 0.01;
        state.lifetime_pd_current = 0.01 * pt.level_ratio;
        pt.bucket = assess_stage(state, config.staging);

        const double el_12m = r_m * p * annuity_factor(std::min(remaining, 12), i_m);
        const double el_lifetime = r_m * p * annuity_factor(remaining, i_m);
        pt.provision = provision_amount(pt.bucket, el_12m, el_lifetime);
        pt.nca = p - pt.provision;
        pt.delta0 = (pt.iacv - pt.nca) * df0;
        out.push_back(pt);
        df0 /= 1.0 + i_ed_m;
    }
    return out;
}

} // namespace iacvlab
