#include "iacvlab/simulator.hpp"

#include "iacvlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace iacvlab {

namespace {

// Counter namespaces, so every draw has a unique (stream, counter) pair.
constexpr std::uint64_t kFactorStream = 0;     // exposure streams start at 1
constexpr std::uint64_t kAttrCounter = 0;      // + attribute index
constexpr std::uint64_t kDefaultCounter = 1000; // + period
constexpr std::uint64_t kDriftCounter = 2000;   // + period
constexpr std::uint64_t kNoiseCounter = 4000;   // + workout period

double signed_unit(CounterRng& rng, std::uint64_t stream, std::uint64_t counter) {
    return 2.0 * rng.uniform(stream, counter) - 1.0;
}

void check_timing(const std::vector<double>& timing, const char* name) {
    if (timing.empty()) {
        return;
    }
    double sum = 0.0;
    for (double w : timing) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument(std::string(name) +
                                        " weights must be non-negative");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(name) + " weights must sum to one");
    }
}

std::vector<double> contract_flows(const ScenarioConfig& config) {
    const double rate = config.period_rate();
    const double principal = config.principal;
    const std::size_t term = config.term;
    std::vector<double> flows(term, 0.0);
    switch (config.amortization) {
    case Amortization::level_coupon_bullet:
        for (std::size_t k = 0; k + 1 < term; ++k) {
            flows[k] = rate * principal;
        }
        flows[term - 1] = principal * (1.0 + rate);
        break;
    case Amortization::annuity: {
        const double payment =
            rate == 0.0 ? principal / static_cast<double>(term)
                        : principal * rate / (1.0 - std::pow(1.0 + rate, -static_cast<double>(term)));
        std::fill(flows.begin(), flows.end(), payment);
        break;
    }
    case Amortization::linear: {
        const double redemption = principal / static_cast<double>(term);
        for (std::size_t k = 0; k < term; ++k) {
            const double outstanding =
                principal * static_cast<double>(term - k) / static_cast<double>(term);
            flows[k] = redemption + rate * outstanding;
        }
        break;
    }
    }
    return flows;
}

std::vector<double> hazard_shape_weights(const ScenarioConfig& config) {
    std::vector<double> shape(config.term, 1.0);
    switch (config.hazard_shape) {
    case HazardShape::neutral:
        break;
    case HazardShape::delayed:
        for (std::size_t t = 0; t < config.delay_periods && t < config.term; ++t) {
            shape[t] = 0.0;
        }
        break;
    case HazardShape::late_peak:
        for (std::size_t t = 0; t < config.term; ++t) {
            shape[t] = static_cast<double>((t + 1) * (t + 1));
        }
        break;
    }
    return shape;
}

// Shared workout model for the defaulted-book simulators: estimates fixed
// at formation, realizations driven by the true unsecured loss rate plus
// multiplicative noise.
struct WorkoutModel {
    std::string id;
    double gca0 = 0.0;
    std::vector<double> est_unsecured; // expected cash per workout period
    std::vector<double> est_collateral;
    std::vector<double> realized; // total realized cash per workout period
    std::size_t cure_period = SIZE_MAX;
};

WorkoutModel make_workout_model(const ScenarioConfig& config, CounterRng& rng,
                                std::uint64_t stream, std::string id,
                                bool cures, std::size_t cure_period) {
    WorkoutModel model;
    model.id = std::move(id);
    model.gca0 = config.principal * (0.75 + 0.5 * rng.uniform(stream, kAttrCounter));

    const std::vector<double>& timing_u = config.recovery_timing;
    const std::vector<double>& timing_c =
        config.collateral_timing.empty() ? config.recovery_timing
                                         : config.collateral_timing;
    const std::size_t horizon = std::max(timing_u.size(), timing_c.size());

    const double collateral_cash = config.collateral_fraction * model.gca0;
    const double uncovered = model.gca0 - collateral_cash;
    const double lgd_true = std::min(0.99, config.lgd_unsecured * config.lgd_bias);
    const double est_total = (1.0 - config.lgd_unsecured) * uncovered;
    const double true_total = (1.0 - lgd_true) * uncovered;

    model.est_unsecured.assign(horizon, 0.0);
    model.est_collateral.assign(horizon, 0.0);
    model.realized.assign(horizon, 0.0);
    for (std::size_t j = 0; j < horizon; ++j) {
        const double wu = j < timing_u.size() ? timing_u[j] : 0.0;
        const double wc = j < timing_c.size() ? timing_c[j] : 0.0;
        model.est_unsecured[j] = est_total * wu;
        model.est_collateral[j] = collateral_cash * wc;
        const double noise =
            config.recovery_noise * signed_unit(rng, stream, kNoiseCounter + j);
        model.realized[j] = (true_total * wu + collateral_cash * wc) * (1.0 + noise);
    }
    if (cures) {
        model.cure_period = cure_period;
    }
    return model;
}

// Observation of one workout model `periods_in` periods after formation.
// method_factor rescales the remaining unsecured estimates (1 = none).
PoolMemberObservation observe_workout(const WorkoutModel& model, std::size_t periods_in,
                                      double rate, double method_factor) {
    PoolMemberObservation obs;
    obs.id = model.id;
    const std::size_t horizon = model.realized.size();

    double realized_cum = 0.0;
    for (std::size_t j = 0; j < std::min(periods_in, horizon); ++j) {
        realized_cum += model.realized[j];
    }
    double gca = model.gca0 - realized_cum;

    if (periods_in >= horizon) {
        // Work-out complete: after the final-period recovery the remainder
        // was written off at period `horizon`.
        obs.gca = 0.0;
        obs.write_off = periods_in == horizon ? std::max(0.0, gca) : 0.0;
        obs.lgd_unsecured = 0.0;
        obs.collateral_value = 0.0;
        obs.guarantor_pd = 1.0;
        obs.cured = false;
        return obs;
    }

    const double coll_pv =
        present_value(std::span<const double>(model.est_collateral).subspan(periods_in), rate);
    const double unsec_pv =
        method_factor *
        present_value(std::span<const double>(model.est_unsecured).subspan(periods_in), rate);

    obs.gca = gca;
    obs.collateral_value = std::min(coll_pv, gca);
    const double uncovered = gca - obs.collateral_value;
    obs.lgd_unsecured =
        uncovered > 1e-12 ? std::clamp(1.0 - unsec_pv / uncovered, 0.0, 1.0) : 0.0;
    obs.guarantor_pd = 1.0;
    obs.cured = model.cure_period != SIZE_MAX && periods_in >= model.cure_period;
    obs.write_off = 0.0;
    return obs;
}

} // namespace

void ScenarioConfig::validate() const {
    if (!std::isfinite(principal) || principal <= 0.0) {
        throw std::invalid_argument("principal must be positive");
    }
    if (term == 0) {
        throw std::invalid_argument("term must be at least one period");
    }
    if (!std::isfinite(contract_rate) || contract_rate <= -1.0) {
        throw std::invalid_argument("contract rate must exceed -1");
    }
    if (!std::isfinite(risk_level) || risk_level < 0.0 || risk_level >= 1.0 + contract_rate) {
        throw std::invalid_argument("risk level must lie in [0, 1 + contract rate)");
    }
    if (!std::isfinite(pd_period) || pd_period < 0.0 || pd_period >= 1.0) {
        throw std::invalid_argument("period default probability must lie in [0, 1)");
    }
    if (!std::isfinite(lgd_mean) || lgd_mean <= 0.0 || lgd_mean >= 1.0) {
        throw std::invalid_argument("mean lgd must lie in (0, 1)");
    }
    if (lgd_half_width < 0.0 || lgd_mean - lgd_half_width <= 0.0 ||
        lgd_mean + lgd_half_width >= 1.0) {
        throw std::invalid_argument("lgd spread must keep lgd inside (0, 1)");
    }
    if (ead_half_width < 0.0 || ead_half_width >= principal) {
        throw std::invalid_argument("ead spread must keep ead positive");
    }
    if (!std::isfinite(correlation) || correlation < 0.0 || correlation >= 1.0) {
        throw std::invalid_argument("factor loading must lie in [0, 1)");
    }
    if (!std::isfinite(true_pd_multiple) || true_pd_multiple <= 0.0) {
        throw std::invalid_argument("true default probability multiple must be positive");
    }
    if (recovery_timing.empty()) {
        throw std::invalid_argument("recovery timing must have at least one period");
    }
    check_timing(recovery_timing, "recovery timing");
    check_timing(collateral_timing, "collateral timing");
    if (collateral_fraction < 0.0 || collateral_fraction >= 1.0) {
        throw std::invalid_argument("collateral fraction must lie in [0, 1)");
    }
    if (lgd_unsecured < 0.0 || lgd_unsecured > 1.0) {
        throw std::invalid_argument("unsecured lgd must lie in [0, 1]");
    }
    if (!std::isfinite(lgd_bias) || lgd_bias <= 0.0 ||
        lgd_unsecured * lgd_bias >= 1.0 + 1e-12) {
        throw std::invalid_argument("lgd bias must keep the true lgd below one");
    }
    if (recovery_noise < 0.0 || recovery_noise >= 1.0) {
        throw std::invalid_argument("recovery noise must lie in [0, 1)");
    }
    if (cure_fraction < 0.0 || cure_fraction > 1.0) {
        throw std::invalid_argument("cure fraction must lie in [0, 1]");
    }
    if (cure_fraction > 0.0 &&
        (cure_first_period == 0 || cure_last_period < cure_first_period)) {
        throw std::invalid_argument("cure window must start at period one or later and "
                                    "end no earlier than it starts");
    }
    if (!std::isfinite(method_adjustment_factor) || method_adjustment_factor <= 0.0) {
        throw std::invalid_argument("method adjustment factor must be positive");
    }
    if (hazard_shape == HazardShape::delayed && delay_periods >= term) {
        throw std::invalid_argument("delay must be shorter than the term");
    }
    if (n_exposures == 0) {
        throw std::invalid_argument("at least one exposure is required");
    }
}

double ScenarioConfig::period_rate() const {
    return period_unit == PeriodUnit::month ? annual_to_monthly_rate(contract_rate)
                                            : contract_rate;
}

double ScenarioConfig::period_risk_level() const {
    if (period_unit == PeriodUnit::month) {
        return annual_to_monthly_rate(contract_rate) -
               annual_to_monthly_rate(contract_rate - risk_level);
    }
    return risk_level;
}

double ScenarioConfig::period_pd() const {
    if (pd_period > 0.0) {
        return pd_period;
    }
    return period_risk_level() / lgd_mean;
}

ScenarioConfig figure_scenario(const std::string& name) {
    ScenarioConfig config;
    if (name == "fig4_1") {
        config.seed = 41;
        config.n_exposures = 1;
        config.term = 5;
        config.amortization = Amortization::annuity;
        config.hazard_shape = HazardShape::delayed;
        config.delay_periods = 1;
        config.contract_rate = 0.05;
        config.risk_level = 0.01;
    } else if (name == "fig5_1") {
        config.seed = 51;
        config.n_exposures = 1;
        config.period_unit = PeriodUnit::month;
        config.term = 60;
        config.amortization = Amortization::level_coupon_bullet;
        config.hazard_shape = HazardShape::neutral;
        config.contract_rate = 0.05;
        config.risk_level = 0.01;
    } else if (name == "fig7_1") {
        config.seed = 71;
        config.n_exposures = 100;
        config.term = 6;
        config.contract_rate = 0.05;
        config.recovery_timing = {0.6, 0.4};
        config.collateral_timing = {0.0, 0.0, 0.0, 0.3, 0.4, 0.3};
        config.collateral_fraction = 0.45;
        config.lgd_unsecured = 0.40;
        config.cure_fraction = 0.3;
        config.cure_first_period = 1;
        config.cure_last_period = 3;
    } else if (name == "fig7_2") {
        config.seed = 72;
        config.n_exposures = 20;
        config.period_unit = PeriodUnit::month;
        config.term = 12;
        config.contract_rate = 0.05;
        config.recovery_timing.assign(12, 1.0 / 12.0);
        config.collateral_fraction = 0.0;
        config.lgd_unsecured = 0.45;
        config.recovery_noise = 0.01;
        config.method_adjustment_factor = 0.8;
        config.method_adjustment_period = 18;
    } else {
        throw std::invalid_argument("unknown scenario '" + name +
                                    "' (known: fig4_1, fig5_1, fig7_1, fig7_2)");
    }
    config.validate();
    return config;
}

std::vector<SimulatedLoan> generate_book(const ScenarioConfig& config) {
    config.validate();
    CounterRng rng(config.seed);

    LoanContract base;
    base.principal = config.principal;
    base.cash_flows = contract_flows(config);
    base.period_unit = config.period_unit;
    base.validate();

    const double rate = config.period_rate();
    const double risk = config.period_risk_level();
    const std::vector<double> gca = gca_trajectory(base, rate);
    const std::vector<double> shape = hazard_shape_weights(config);
    const RiskProfile profile = normalize_profile(shape, risk, gca, rate - risk);

    // Per-period default probabilities implied by the loss profile.
    const std::vector<double> hazards = hazard_rates(profile.expected_losses, gca);
    std::vector<double> thresholds(config.term, 0.0);
    std::vector<bool> can_default(config.term, false);
    for (std::size_t t = 0; t < config.term; ++t) {
        const double q = std::clamp(hazards[t] / config.lgd_mean * config.true_pd_multiple,
                                    0.0, 1.0 - 1e-12);
        if (q > 0.0) {
            thresholds[t] = norm_icdf(q);
            can_default[t] = true;
        }
    }

    const double loading = config.correlation;
    const double idio = std::sqrt(1.0 - loading * loading);

    std::vector<SimulatedLoan> book;
    book.reserve(config.n_exposures);
    for (std::size_t i = 0; i < config.n_exposures; ++i) {
        SimulatedLoan loan;
        loan.contract = base;
        loan.contract.id = "loan" + std::to_string(i + 1);
        loan.profile = profile;
        const std::uint64_t stream = i + 1;
        for (std::size_t t = 0; t < config.term; ++t) {
            if (!can_default[t]) {
                continue;
            }
            const double z = loading > 0.0 ? rng.normal(kFactorStream, t) : 0.0;
            const double x =
                loading * z + idio * rng.normal(stream, kDefaultCounter + t);
            if (x <= thresholds[t]) {
                loan.default_period = t + 1;
                break;
            }
        }
        book.push_back(std::move(loan));
    }
    return book;
}

PortfolioSimulation simulate_portfolio(const ScenarioConfig& config,
                                       std::size_t periods) {
    config.validate();
    CounterRng rng(config.seed);

    const double pd = config.period_pd();
    if (pd <= 0.0 || pd >= 1.0) {
        throw std::invalid_argument("derived period default probability must lie in (0, 1)");
    }
    const double threshold =
        norm_icdf(std::clamp(pd * config.true_pd_multiple, 1e-12, 1.0 - 1e-12));
    const double loading = config.correlation;
    const double idio = std::sqrt(1.0 - loading * loading);
    const std::vector<double>& timing = config.recovery_timing;
    const std::size_t workout = timing.size();

    struct ExposureState {
        double ead = 0.0;
        double lgd = 0.0;
        bool performing = true;
        std::size_t default_period = 0; // snapshot index of the default EOP
        double ead_def = 0.0;
        double lgd_def = 0.0;
        double lgd_true = 0.0;
        double realized_cum = 0.0;
        bool resolved = false;
    };

    std::vector<ExposureState> states(config.n_exposures);
    for (std::size_t i = 0; i < config.n_exposures; ++i) {
        const std::uint64_t stream = i + 1;
        states[i].ead = config.principal +
                        config.ead_half_width * signed_unit(rng, stream, kAttrCounter);
        states[i].lgd = std::clamp(config.lgd_mean + config.lgd_half_width *
                                                         signed_unit(rng, stream, kAttrCounter + 1),
                                   0.01, 0.99);
    }

    const auto tail_weight = [&timing](std::size_t from) {
        double sum = 0.0;
        for (std::size_t j = from; j < timing.size(); ++j) {
            sum += timing[j];
        }
        return sum;
    };

    PortfolioSimulation result;
    result.snapshots.reserve(periods + 1);
    result.new_default_counts.assign(periods, 0);

    const auto record_of = [&](const ExposureState& s, std::size_t i,
                               double wo) {
        ExposureRecord record;
        record.id = "e" + std::to_string(i + 1);
        record.performing = s.performing;
        record.wo_in_period = wo;
        if (s.performing) {
            record.ead = s.ead;
            record.lgd = s.lgd;
            record.pd = pd;
            record.el = pd * s.ead * s.lgd;
        } else if (s.resolved) {
            record.ead = 0.0;
            record.lgd = 0.0;
            record.pd = 1.0;
            record.el = 0.0;
            record.ead_at_default = s.ead_def;
            record.lgd_at_default = s.lgd_def;
        } else {
            record.ead = s.ead;
            record.lgd = s.lgd;
            record.pd = 1.0;
            record.el = s.ead * s.lgd;
            record.ead_at_default = s.ead_def;
            record.lgd_at_default = s.lgd_def;
        }
        return record;
    };

    // Snapshot 0: everything performing.
    PortfolioSnapshot initial;
    initial.as_of = 0;
    for (std::size_t i = 0; i < config.n_exposures; ++i) {
        initial.exposures.push_back(record_of(states[i], i, 0.0));
    }
    initial.validate();
    result.snapshots.push_back(std::move(initial));

    for (std::size_t t = 0; t < periods; ++t) {
        PortfolioSnapshot snapshot;
        snapshot.as_of = static_cast<std::int64_t>(t + 1);
        const double z = loading > 0.0 ? rng.normal(kFactorStream, t) : 0.0;

        for (std::size_t i = 0; i < config.n_exposures; ++i) {
            ExposureState& s = states[i];
            const std::uint64_t stream = i + 1;
            double wo = 0.0;

            if (s.performing) {
                const double x =
                    loading * z + idio * rng.normal(stream, kDefaultCounter + t);
                if (x <= threshold) {
                    // Default in this period; exposure and severity may be
                    // re-estimated at default.
                    s.performing = false;
                    s.default_period = t + 1;
                    s.ead_def = s.ead * (1.0 + config.ead_drift_at_default *
                                                   signed_unit(rng, stream, kDriftCounter + t));
                    s.lgd_def = std::clamp(
                        s.lgd + config.lgd_shift_at_default *
                                    signed_unit(rng, stream, kDriftCounter + t + 500000),
                        0.01, 0.99);
                    s.lgd_true = std::min(0.99, s.lgd_def * config.lgd_bias);
                    s.ead = s.ead_def;
                    s.lgd = s.lgd_def;
                    s.realized_cum = 0.0;
                    ++result.new_default_counts[t];
                }
            } else if (!s.resolved) {
                const std::size_t j = t + 1 - s.default_period; // workout period, 1-based
                if (j >= 1 && j <= workout) {
                    const double noise = config.recovery_noise *
                                         signed_unit(rng, stream, kNoiseCounter + t);
                    const double recovery = s.ead_def * (1.0 - s.lgd_true) *
                                            timing[j - 1] * (1.0 + noise);
                    s.realized_cum += recovery;
                    s.ead = s.ead_def - s.realized_cum;
                    const double remaining_est =
                        s.ead_def * (1.0 - s.lgd_def) * tail_weight(j);
                    double el = s.ead - remaining_est;
                    if (j == workout) {
                        // Terminal write-off of whatever was not recovered.
                        wo = std::max(0.0, s.ead);
                        s.resolved = true;
                        s.ead = 0.0;
                        s.lgd = 0.0;
                    } else {
                        el = std::max(0.0, el);
                        s.lgd = s.ead > 1e-12 ? el / s.ead : 0.0;
                    }
                }
            }
            snapshot.exposures.push_back(record_of(s, i, wo));
        }
        snapshot.validate();
        result.snapshots.push_back(std::move(snapshot));
    }
    return result;
}

LossSeriesSimulation simulate_loss_series(const ScenarioConfig& config,
                                          std::size_t periods) {
    config.validate();
    CounterRng rng(config.seed);

    const double pd = config.period_pd();
    if (pd <= 0.0 || pd >= 1.0) {
        throw std::invalid_argument("derived period default probability must lie in (0, 1)");
    }
    const double threshold =
        norm_icdf(std::clamp(pd * config.true_pd_multiple, 1e-12, 1.0 - 1e-12));
    const double loading = config.correlation;
    const double idio = std::sqrt(1.0 - loading * loading);

    LossSeriesSimulation result;
    result.severities.reserve(config.n_exposures);
    for (std::size_t i = 0; i < config.n_exposures; ++i) {
        const std::uint64_t stream = i + 1;
        const double ead = config.principal +
                           config.ead_half_width * signed_unit(rng, stream, kAttrCounter);
        const double lgd = std::clamp(config.lgd_mean + config.lgd_half_width *
                                                            signed_unit(rng, stream, kAttrCounter + 1),
                                      0.01, 0.99);
        result.severities.push_back(ead * lgd);
    }

    result.losses.assign(periods, 0.0);
    result.default_counts.assign(periods, 0);
    for (std::size_t t = 0; t < periods; ++t) {
        const double z = loading > 0.0 ? rng.normal(kFactorStream, t) : 0.0;
        double loss = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < config.n_exposures; ++i) {
            const double x =
                loading * z + idio * rng.normal(i + 1, kDefaultCounter + t);
            if (x <= threshold) {
                loss += result.severities[i];
                ++count;
            }
        }
        result.losses[t] = loss;
        result.default_counts[t] = count;
    }
    return result;
}

StaticPoolSimulation simulate_static_pool(const ScenarioConfig& config) {
    config.validate();
    CounterRng rng(config.seed);
    const double rate = config.period_rate();

    const std::size_t cured_members = static_cast<std::size_t>(
        std::floor(config.cure_fraction * static_cast<double>(config.n_exposures)));
    const std::size_t cure_span =
        config.cure_last_period >= config.cure_first_period
            ? config.cure_last_period - config.cure_first_period + 1
            : 1;

    std::vector<WorkoutModel> models;
    models.reserve(config.n_exposures);
    std::size_t horizon = 0;
    for (std::size_t i = 0; i < config.n_exposures; ++i) {
        const bool cures = i < cured_members && config.cure_fraction > 0.0;
        const std::size_t cure_period = config.cure_first_period + (i % cure_span);
        models.push_back(make_workout_model(config, rng, i + 1,
                                            "w" + std::to_string(i + 1), cures,
                                            cure_period));
        horizon = std::max(horizon, models.back().realized.size());
    }

    StaticPoolSimulation result;
    StaticPool& pool = result.pool;
    pool.id = "pool1";
    pool.discount_rate = rate;
    for (const WorkoutModel& model : models) {
        pool.member_ids.push_back(model.id);
        std::vector<double> schedule(model.est_unsecured.size(), 0.0);
        for (std::size_t j = 0; j < schedule.size(); ++j) {
            schedule[j] = model.est_unsecured[j] + model.est_collateral[j];
        }
        result.expected_recoveries[model.id] = std::move(schedule);
    }
    for (std::size_t t = 0; t <= horizon; ++t) {
        PoolPeriod period;
        period.as_of = static_cast<std::int64_t>(t);
        for (const WorkoutModel& model : models) {
            period.members.push_back(observe_workout(model, t, rate, 1.0));
        }
        pool.history.push_back(std::move(period));
    }
    pool.validate();
    return result;
}

std::vector<PoolPeriod> simulate_npl_book(const ScenarioConfig& config,
                                          std::size_t months) {
    config.validate();
    CounterRng rng(config.seed);
    const double rate = config.period_rate();

    struct Cohort {
        std::size_t formed = 0;
        std::vector<WorkoutModel> models;
    };

    std::vector<Cohort> cohorts;
    cohorts.reserve(months);
    for (std::size_t k = 0; k < months; ++k) {
        Cohort cohort;
        cohort.formed = k;
        for (std::size_t i = 0; i < config.n_exposures; ++i) {
            const std::uint64_t stream = 1 + k * config.n_exposures + i;
            cohort.models.push_back(make_workout_model(
                config, rng, stream,
                "c" + std::to_string(k) + "m" + std::to_string(i + 1), false, 0));
        }
        cohorts.push_back(std::move(cohort));
    }

    std::vector<PoolPeriod> book;
    book.reserve(months);
    for (std::size_t t = 0; t < months; ++t) {
        PoolPeriod period;
        period.as_of = static_cast<std::int64_t>(t);
        const double method_factor =
            (config.method_adjustment_period > 0 && t >= config.method_adjustment_period)
                ? config.method_adjustment_factor
                : 1.0;
        for (const Cohort& cohort : cohorts) {
            if (cohort.formed > t) {
                continue;
            }
            const std::size_t periods_in = t - cohort.formed;
            for (const WorkoutModel& model : cohort.models) {
                period.members.push_back(
                    observe_workout(model, periods_in, rate, method_factor));
            }
        }
        book.push_back(std::move(period));
    }
    return book;
}

} // namespace iacvlab
