#include "iacvlab/dashboards.hpp"

#include "iacvlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace iacvlab {

namespace {

double el_tolerance(const ExposureRecord& e) {
    return 1e-9 * std::max(1.0, e.ead);
}

const ExposureRecord* find(const std::unordered_map<std::string, const ExposureRecord*>& index,
                           const std::string& id) {
    auto it = index.find(id);
    return it == index.end() ? nullptr : it->second;
}

std::unordered_map<std::string, const ExposureRecord*>
build_index(const PortfolioSnapshot& snapshot) {
    std::unordered_map<std::string, const ExposureRecord*> index;
    index.reserve(snapshot.exposures.size());
    for (const auto& e : snapshot.exposures) {
        if (!index.emplace(e.id, &e).second)
            throw std::invalid_argument("snapshot " + std::to_string(snapshot.as_of) +
                                        ": duplicate exposure id " + e.id);
    }
    return index;
}

void require_matched(const PortfolioSnapshot& bop,
                     const std::unordered_map<std::string, const ExposureRecord*>& bop_index,
                     const PortfolioSnapshot& eop) {
    for (const auto& e : eop.exposures)
        if (!bop_index.count(e.id))
            throw std::invalid_argument("exposure " + e.id + " appears at " +
                                        std::to_string(eop.as_of) +
                                        " without a record at " +
                                        std::to_string(bop.as_of));
}

double pl_dashboard_scaled(const PortfolioSnapshot& bop,
                           const PortfolioSnapshot& eop, double bop_el_factor) {
    auto bop_index = build_index(bop);
    require_matched(bop, bop_index, eop);

    double el_pl_bop = 0.0;
    for (const auto& e : bop.exposures)
        if (e.performing) el_pl_bop += e.el;

    double new_npl = 0.0;
    for (const auto& e : eop.exposures) {
        if (e.performing) continue;
        const ExposureRecord* before = find(bop_index, e.id);
        if (before && before->performing) new_npl += e.el + e.wo_in_period;
    }
    return new_npl - bop_el_factor * el_pl_bop;
}

} // namespace

void PortfolioSnapshot::validate() const {
    std::unordered_set<std::string> seen;
    seen.reserve(exposures.size());
    for (const auto& e : exposures) {
        const std::string where = "snapshot " + std::to_string(as_of) +
                                  ", exposure " + e.id;
        if (e.id.empty())
            throw std::invalid_argument(where + ": empty id");
        if (!seen.insert(e.id).second)
            throw std::invalid_argument(where + ": duplicate id");
        if (!(e.ead >= 0.0) || !std::isfinite(e.ead))
            throw std::invalid_argument(where + ": ead must be >= 0");
        if (!(e.lgd >= 0.0 && e.lgd <= 1.0))
            throw std::invalid_argument(where + ": lgd must lie in [0, 1]");
        if (!(e.pd >= 0.0 && e.pd <= 1.0))
            throw std::invalid_argument(where + ": pd must lie in [0, 1]");
        if (!(e.wo_in_period >= 0.0) || !std::isfinite(e.wo_in_period))
            throw std::invalid_argument(where + ": write-off must be >= 0");
        const double expected = e.performing ? e.pd * e.ead * e.lgd : e.ead * e.lgd;
        if (std::abs(e.el - expected) > el_tolerance(e))
            throw std::invalid_argument(where + ": el inconsistent with pd * ead * lgd");
        if (e.ead_at_default.has_value() != e.lgd_at_default.has_value())
            throw std::invalid_argument(where + ": default-time ead and lgd must come together");
    }
}

double PortfolioSnapshot::total_ead() const {
    double s = 0.0;
    for (const auto& e : exposures) s += e.ead;
    return s;
}

double PortfolioSnapshot::total_el() const {
    double s = 0.0;
    for (const auto& e : exposures) s += e.el;
    return s;
}

double PortfolioSnapshot::el_performing() const {
    double s = 0.0;
    for (const auto& e : exposures)
        if (e.performing) s += e.el;
    return s;
}

double PortfolioSnapshot::el_non_performing() const {
    double s = 0.0;
    for (const auto& e : exposures)
        if (!e.performing) s += e.el;
    return s;
}

double PortfolioSnapshot::total_write_offs() const {
    double s = 0.0;
    for (const auto& e : exposures) s += e.wo_in_period;
    return s;
}

double impact_of_risk(double cost_of_risk, double delta_shortfall) {
    return cost_of_risk + delta_shortfall;
}

double ior_from_el(double el_eop, double el_bop, double write_offs) {
    return el_eop - el_bop + write_offs;
}

double probability_weighted_el(std::span<const double> losses,
                               std::span<const double> weights) {
    if (losses.size() != weights.size())
        throw std::invalid_argument("probability_weighted_el: size mismatch");
    if (losses.empty())
        throw std::invalid_argument("probability_weighted_el: empty scenario set");
    double total = 0.0, acc = 0.0;
    for (std::size_t k = 0; k < losses.size(); ++k) {
        if (weights[k] < 0.0)
            throw std::invalid_argument("probability_weighted_el: negative weight");
        total += weights[k];
        acc += losses[k] * weights[k];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("probability_weighted_el: weights must sum to 1");
    return acc;
}

double pl_dashboard(const PortfolioSnapshot& bop, const PortfolioSnapshot& eop) {
    return pl_dashboard_scaled(bop, eop, 1.0);
}

double monthly_pl_dashboard(const PortfolioSnapshot& bop,
                            const PortfolioSnapshot& eop) {
    return pl_dashboard_scaled(bop, eop, 1.0 / 12.0);
}

PlSplit pl_split(const PortfolioSnapshot& bop, const PortfolioSnapshot& eop) {
    auto bop_index = build_index(bop);
    require_matched(bop, bop_index, eop);

    double el_pl_bop = 0.0;
    for (const auto& e : bop.exposures)
        if (e.performing) el_pl_bop += e.el;

    PlSplit split;
    double bop_estimate_new_npl = 0.0;
    for (const auto& e : eop.exposures) {
        if (e.performing) continue;
        const ExposureRecord* before = find(bop_index, e.id);
        if (!before || !before->performing) continue;

        const double at_bop = before->ead * before->lgd;
        const double at_eop = e.ead * e.lgd + e.wo_in_period;
        bop_estimate_new_npl += at_bop;
        if (e.ead_at_default && e.lgd_at_default) {
            const double at_def = *e.ead_at_default * *e.lgd_at_default;
            split.delta_ead += at_def - at_bop;
            split.delta_lgd += at_eop - at_def;
        } else {
            split.residual += at_eop - at_bop;
            ++split.missing_default_data;
        }
    }
    split.delta_pd = bop_estimate_new_npl - el_pl_bop;
    return split;
}

std::vector<double> loss_series(std::span<const PortfolioSnapshot> snapshots,
                                bool include_revisions) {
    if (snapshots.size() < 2)
        throw std::invalid_argument("loss_series: need at least two snapshots");
    const std::int64_t step = snapshots[1].as_of - snapshots[0].as_of;
    if (step <= 0)
        throw std::invalid_argument("loss_series: snapshots must be strictly increasing");
    for (std::size_t k = 1; k < snapshots.size(); ++k)
        if (snapshots[k].as_of - snapshots[k - 1].as_of != step)
            throw std::invalid_argument("loss_series: gap in the snapshot cadence at " +
                                        std::to_string(snapshots[k].as_of));

    std::vector<double> losses;
    losses.reserve(snapshots.size() - 1);
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        const auto& bop = snapshots[k - 1];
        const auto& eop = snapshots[k];
        auto bop_index = build_index(bop);
        require_matched(bop, bop_index, eop);
        double loss = 0.0;
        for (const auto& e : eop.exposures) {
            if (e.performing) continue;
            const ExposureRecord* before = find(bop_index, e.id);
            if (!before || !before->performing) continue;
            if (!include_revisions && e.ead_at_default && e.lgd_at_default)
                loss += *e.ead_at_default * *e.lgd_at_default + e.wo_in_period;
            else
                loss += e.el + e.wo_in_period;
        }
        losses.push_back(loss);
    }
    return losses;
}

IorDecomposition ior_decomposition(const PortfolioSnapshot& bop,
                                   const PortfolioSnapshot& eop) {
    auto bop_index = build_index(bop);
    auto eop_index = build_index(eop);
    require_matched(bop, bop_index, eop);

    IorDecomposition d;
    d.ior = ior_from_el(eop.total_el(), bop.total_el(), eop.total_write_offs());

    double el_pl_bop = 0.0, el_npl_bop = 0.0;
    for (const auto& e : bop.exposures)
        (e.performing ? el_pl_bop : el_npl_bop) += e.el;

    double el_new_npl = 0.0, wo_new_npl = 0.0;
    double el_old_npl = 0.0, wo_old_npl = 0.0;
    for (const auto& e : eop.exposures) {
        const ExposureRecord* before = find(bop_index, e.id);
        if (!before->performing) {
            // BOP non-performing cohort, cures included.
            el_old_npl += e.el;
            wo_old_npl += e.wo_in_period;
        } else if (!e.performing) {
            el_new_npl += e.el;
            wo_new_npl += e.wo_in_period;
        } else {
            d.el_pl_eop += e.el;
        }
    }
    d.pl_dashboard = el_new_npl + wo_new_npl - el_pl_bop;
    d.npl_dashboard = el_old_npl + wo_old_npl - el_npl_bop;
    d.residual = d.ior - (d.el_pl_eop + d.pl_dashboard + d.npl_dashboard);
    return d;
}

namespace {

// Inverse-CDF table for Binomial(n, p), truncated where the tail mass
// drops below 1e-15.
std::vector<double> binomial_cdf(std::size_t n, double p) {
    std::vector<double> cdf;
    const double odds = p / (1.0 - p);
    double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
    double acc = pmf;
    cdf.push_back(acc);
    for (std::size_t k = 0; k < n; ++k) {
        pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        acc += pmf;
        cdf.push_back(acc);
        if (1.0 - acc < 1e-15) break;
    }
    return cdf;
}

std::size_t invert_cdf(const std::vector<double>& cdf, double u) {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<std::size_t>(it == cdf.end() ? cdf.size() - 1
                                                    : it - cdf.begin());
}

} // namespace

NullTestResult binomial_null_test(std::span<const double> losses,
                                  std::size_t exposure_count, double pd_period,
                                  std::span<const double> ead_lgd_weights,
                                  double alpha, const McOptions& options) {
    if (losses.size() < 12)
        throw std::invalid_argument("binomial_null_test: series shorter than 12 periods");
    if (!(pd_period > 0.0 && pd_period < 1.0))
        throw std::domain_error("binomial_null_test: pd must lie in (0, 1)");
    if (exposure_count == 0)
        throw std::invalid_argument("binomial_null_test: empty portfolio");
    if (ead_lgd_weights.empty())
        throw std::invalid_argument("binomial_null_test: empty severity weights");
    for (double w : ead_lgd_weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("binomial_null_test: severities must be finite and >= 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("binomial_null_test: alpha must lie in (0, 1)");

    const std::size_t draws = std::max<std::size_t>(options.draws, 100000);
    const CounterRng rng(options.seed);
    const std::vector<double> cdf = binomial_cdf(exposure_count, pd_period);

    std::vector<double> reference(draws);
    for (std::size_t d = 0; d < draws; ++d) {
        const std::size_t k = invert_cdf(cdf, rng.uniform(d, 0));
        double loss = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const auto idx = static_cast<std::size_t>(
                rng.uniform(d, j) * static_cast<double>(ead_lgd_weights.size()));
            loss += ead_lgd_weights[std::min(idx, ead_lgd_weights.size() - 1)];
        }
        reference[d] = loss;
    }
    std::sort(reference.begin(), reference.end());

    NullTestResult result;
    result.alpha = alpha;
    result.draws = draws;
    result.workers = options.workers;
    const auto n = static_cast<double>(draws);
    result.band_lo = reference[static_cast<std::size_t>(alpha / 2.0 * n)];
    result.band_hi = reference[std::min(draws - 1, static_cast<std::size_t>((1.0 - alpha / 2.0) * n))];

    result.p_values.reserve(losses.size());
    result.flagged.reserve(losses.size());
    std::size_t flagged = 0;
    for (double x : losses) {
        const auto le = static_cast<double>(
            std::upper_bound(reference.begin(), reference.end(), x) - reference.begin());
        const auto ge = static_cast<double>(
            reference.end() - std::lower_bound(reference.begin(), reference.end(), x));
        const double p = std::min(1.0, 2.0 * std::min(le / n, ge / n));
        result.p_values.push_back(p);
        const bool flag = p < alpha;
        result.flagged.push_back(flag);
        flagged += flag ? 1 : 0;
    }
    result.flagged_fraction =
        static_cast<double>(flagged) / static_cast<double>(losses.size());
    return result;
}

} // namespace iacvlab
