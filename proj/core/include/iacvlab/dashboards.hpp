#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iacvlab {

/// One exposure in a portfolio snapshot. For performing exposures el is
/// the expected loss pd * ead * lgd; once non-performing, pd is 1 by
/// convention and el = ead * lgd. wo_in_period is the amount written off
/// during the period that ends at the snapshot date. ead_at_default and
/// lgd_at_default hold the risk parameters measured when the default was
/// identified (needed for the PD/EAD/LGD split of the dashboard).
struct ExposureRecord {
    std::string id;
    bool performing = true;
    double ead = 0.0;
    double lgd = 0.0;
    double pd = 0.0;
    double el = 0.0;
    double wo_in_period = 0.0;
    std::optional<double> ead_at_default;
    std::optional<double> lgd_at_default;
};

struct PortfolioSnapshot {
    std::int64_t as_of = 0;
    std::vector<ExposureRecord> exposures;

    /// Bounds, uniqueness of ids, and el consistency
    /// (|el - pd * ead * lgd| <= 1e-9 * max(1, ead) while performing,
    /// |el - ead * lgd| <= same once non-performing).
    void validate() const;

    double total_ead() const;
    double total_el() const;
    double el_performing() const;
    double el_non_performing() const;
    double total_write_offs() const;
};

/// IoR = CoR + change in provision shortfall.
double impact_of_risk(double cost_of_risk, double delta_shortfall);

/// IoR = EL_EOP - EL_BOP + write-offs of the period.
double ior_from_el(double el_eop, double el_bop, double write_offs);

/// Scenario-weighted expected loss. Weights must be non-negative and sum
/// to 1 within 1e-9.
double probability_weighted_el(std::span<const double> losses,
                               std::span<const double> weights);

/// Backtest value of the performing book over one period:
/// EL of the new defaults at period end, plus their write-offs, minus the
/// expected loss held against the performing book at period start.
/// Fluctuates around zero when the EL estimates are unbiased. Throws
/// std::invalid_argument when an id appears at EOP without a BOP record.
double pl_dashboard(const PortfolioSnapshot& bop, const PortfolioSnapshot& eop);

/// Monthly variant: the annual BOP expected loss is released linearly,
/// i.e. one twelfth per month.
double monthly_pl_dashboard(const PortfolioSnapshot& bop, const PortfolioSnapshot& eop);

/// PD / EAD / LGD attribution of the PL dashboard over the new defaults.
/// delta_lgd carries the period write-offs of the new defaults (a write-off
/// is loss already realized at EOP), so the three terms plus the residual
/// telescope exactly to pl_dashboard. New defaults without default-time
/// data contribute their BOP estimate to delta_pd and the remainder to the
/// residual; missing_default_data counts them.
struct PlSplit {
    double delta_pd = 0.0;
    double delta_ead = 0.0;
    double delta_lgd = 0.0;
    double residual = 0.0;
    std::size_t missing_default_data = 0;

    bool partial() const { return missing_default_data > 0; }
    double total() const { return delta_pd + delta_ead + delta_lgd + residual; }
};

PlSplit pl_split(const PortfolioSnapshot& bop, const PortfolioSnapshot& eop);

/// Per-period realized loss from new defaults. With default-time data
/// present the loss is taken as identified at default
/// (EAD_DEF * LGD_DEF + wo); include_revisions switches to the period-end
/// estimate (EL_EOP + wo), folding same-period EAD/LGD revisions into the
/// default month. Snapshots must be equally spaced; gaps raise
/// std::invalid_argument.
std::vector<double> loss_series(std::span<const PortfolioSnapshot> snapshots,
                                bool include_revisions = false);

/// IoR = EL_PL_EOP + PL dashboard + NPL dashboard, partitioned by BOP
/// status: el_pl_eop covers exposures performing at both ends, the NPL
/// term follows the BOP non-performing cohort wherever it goes (cures
/// included). residual is IoR minus the three terms; anything nonzero
/// (e.g. write-offs on still-performing exposures) is surfaced, never
/// absorbed.
struct IorDecomposition {
    double el_pl_eop = 0.0;
    double pl_dashboard = 0.0;
    double npl_dashboard = 0.0;
    double ior = 0.0;
    double residual = 0.0;
};

IorDecomposition ior_decomposition(const PortfolioSnapshot& bop,
                                   const PortfolioSnapshot& eop);

struct McOptions {
    std::size_t draws = 100000;   // lower values are raised to this floor
    std::uint64_t seed = 7001;
    std::size_t workers = 1;      // informational; results do not depend on it
};

/// Null-model check of a realized loss series against the compound
/// binomial model: defaults ~ Binomial(exposure_count, pd_period), each
/// default drawing one severity from ead_lgd_weights. The reference
/// distribution is simulated once (seeded, counter-based); each period
/// gets a two-sided Monte Carlo p-value and is flagged when p < alpha.
struct NullTestResult {
    std::vector<double> p_values;
    std::vector<bool> flagged;
    double flagged_fraction = 0.0;
    double alpha = 0.0;
    double band_lo = 0.0;   // central (1 - alpha) acceptance band
    double band_hi = 0.0;
    std::size_t draws = 0;
    std::size_t workers = 1;
};

NullTestResult binomial_null_test(std::span<const double> losses,
                                  std::size_t exposure_count, double pd_period,
                                  std::span<const double> ead_lgd_weights,
                                  double alpha, const McOptions& options = {});

} // namespace iacvlab
