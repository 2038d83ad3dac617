#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iacvlab {

/// A defaulted exposure in workout. The net carrying amount can be read
/// two ways: as the present value of the expected recoveries at the
/// effective rate, or through the collateral / unsecured / guarantee
/// decomposition; when both inputs are present they must agree.
struct NplExposure {
    std::string id;
    double gca = 0.0;
    std::vector<double> expected_recoveries; // due at the end of future periods 1..m
    double collateral_value = 0.0;           // after haircuts, PV terms
    double lgd_unsecured = 0.0;              // loss rate on the uncollateralized part
    double guarantor_pd = 1.0;               // 1 = no guarantee support
    bool cured = false;
    double effective_rate = 0.05;

    double nca_from_recoveries() const;

    /// Bounds, and |PV(recoveries) - decomposed NCA| <= 1e-9 * gca when a
    /// recovery schedule is present. Throws std::invalid_argument.
    void validate() const;
};

/// Collateral-and-loss split of the gross carrying amount. For non-cured
/// exposures collateral + unsecured + guarantee + expected_loss = gca
/// exactly; for cured ones the whole net amount is reported as cure and
/// the split parts are zero.
struct NcaDecomposition {
    double collateral = 0.0;
    double unsecured = 0.0;   // (1 - LGD_u) * (GCA - collateral)
    double guarantee = 0.0;   // (1 - PD) * LGD_u * (GCA - collateral)
    double cure = 0.0;
    double expected_loss = 0.0; // PD * LGD_u * (GCA - collateral)

    double nca() const { return collateral + unsecured + guarantee + cure; }
};

NcaDecomposition decompose_nca(double gca, double collateral_value,
                               double lgd_unsecured, double guarantor_pd,
                               bool cured = false);
NcaDecomposition decompose_nca(const NplExposure& exposure);

/// Interest treatment of a defaulted exposure: freeze the gross amount or
/// accrue unwinding interest on it.
enum class UnwindingConvention {
    no_accrual,    // GCA_EOP = GCA_BOP - recovery - wo
    nca_unwinding  // GCA_EOP = GCA_BOP - recovery + i * NCA_BOP - wo
};

/// One exposure or pool rolled through workout with the estimated
/// recovery schedule held fixed (estimates are revised only through the
/// explicit schedule, realizations do not feed back).
struct WorkoutState {
    double gca = 0.0;
    std::vector<double> expected_recoveries; // remaining, next period first
    double rate = 0.05;
    UnwindingConvention convention = UnwindingConvention::no_accrual;

    double nca() const;
    double el() const { return gca - nca(); }
};

struct WorkoutStep {
    double realized_recovery = 0.0;
    double write_off = 0.0;
    double nca_bop = 0.0;
    double el_bop = 0.0;
    double el_eop = 0.0;
    double dashboard = 0.0;   // el_eop + write_off - el_bop
    double corrected = 0.0;   // dashboard + rate * nca_bop
};

/// Advances one period. realized defaults to the expected recovery of the
/// period (unbiased realization).
WorkoutStep step_workout(WorkoutState& state,
                         std::optional<double> realized = std::nullopt,
                         double write_off = 0.0);

/// Backtest value of a defaulted book over one period:
/// EL_EOP + write-offs - EL_BOP. Unbiased estimates give -i * NCA_BOP
/// under no_accrual and zero under nca_unwinding.
double npl_dashboard(double el_bop, double el_eop, double write_offs);

/// Removes the mechanical unwinding drift from a raw dashboard value.
double unwinding_correction(double raw_dashboard, double rate, double nca_bop);

/// One member of a static pool observed at one date. write_off is the
/// amount written off during the period that ends at this date.
struct PoolMemberObservation {
    std::string id;
    double gca = 0.0;
    double collateral_value = 0.0;
    double lgd_unsecured = 0.0;
    double guarantor_pd = 1.0;
    bool cured = false;
    double write_off = 0.0;
};

struct PoolPeriod {
    std::int64_t as_of = 0;
    std::vector<PoolMemberObservation> members;
};

/// Sum of the member decompositions plus gross amount and write-offs.
struct PoolAggregate {
    double gca = 0.0;
    double collateral = 0.0;
    double unsecured = 0.0;
    double guarantee = 0.0;
    double cure = 0.0;
    double expected_loss = 0.0;
    double write_offs = 0.0;

    double nca() const { return collateral + unsecured + guarantee + cure; }
};

PoolAggregate aggregate(const PoolPeriod& period);

/// Cohort of defaults formed at one date and tracked until liquidation.
/// Membership is frozen at formation; observations of unknown ids are a
/// pool violation.
struct StaticPool {
    std::string id;
    double discount_rate = 0.05;
    std::vector<std::string> member_ids;
    std::vector<PoolPeriod> history; // index 0 = formation

    void validate() const;
};

/// Total expected loss trace: TEL_t = EL_t + cumulative write-offs +
/// cumulative unwinding interest (i * NCA at each period start). Flat for
/// unbiased estimates; drifts exactly by the estimation bias. Computed
/// both directly and through the per-period dashboards and reconciled to
/// 1e-9 * GCA_0.
struct TelPoint {
    std::int64_t as_of = 0;
    double el = 0.0;
    double write_offs_cum = 0.0;
    double interest_cum = 0.0;
    double tel = 0.0;
    double dashboard = 0.0;  // of the period ending here, 0 at formation
    double corrected = 0.0;  // dashboard + i * NCA_BOP
    PoolAggregate parts;
};

std::vector<TelPoint> static_pool_tel(const StaticPool& pool,
                                      std::size_t horizon = SIZE_MAX);

/// Stacked view per period: write-offs, expected loss and unwinding
/// interest (together the TEL), then the net carrying amount split into
/// unsecured, guarantee, collateral and cure. The identity
/// el + unsecured + guarantee + collateral + cure = gca is enforced per
/// period to 1e-6 * GCA_0.
struct VintageRow {
    std::int64_t as_of = 0;
    double write_offs_cum = 0.0;
    double expected_loss = 0.0;
    double interest_cum = 0.0;
    double tel = 0.0;
    double unsecured = 0.0;
    double guarantee = 0.0;
    double collateral = 0.0;
    double cure = 0.0;
    double gca = 0.0;
};

std::vector<VintageRow> vintage_report(const StaticPool& pool);

/// Rolling surveillance of an open defaulted book (inflows allowed). Each
/// window compares the end state of the members already present at the
/// window start against their start state; new defaults are excluded from
/// the movement. corrected removes the unwinding drift; a run of
/// run_length consecutive same-sign corrected values raises the trend
/// flag on the value completing the run.
struct MonitorConfig {
    double discount_rate = 0.05;
    int window = 1;   // in snapshot steps
    int run_length = 6;
};

struct WindowPoint {
    std::int64_t bop_as_of = 0;
    std::int64_t eop_as_of = 0;
    double dashboard = 0.0;
    double corrected = 0.0;
    double nca_bop = 0.0;
    double delta_collateral = 0.0;
    double delta_unsecured = 0.0;
    double delta_guarantee = 0.0;
    double delta_cure = 0.0;
    bool trend_flag = false;
};

std::vector<WindowPoint> moving_window_monitor(std::span<const PoolPeriod> snapshots,
                                               const MonitorConfig& config = {});

} // namespace iacvlab
