#include "iacvlab/npl.hpp"

#include "iacvlab/cashflow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace iacvlab {

namespace {

void check_unit_interval(double value, const char* name) {
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
}

} // namespace

double NplExposure::nca_from_recoveries() const {
    return present_value(expected_recoveries, effective_rate);
}

void NplExposure::validate() const {
    if (!std::isfinite(gca) || gca < 0.0) {
        throw std::invalid_argument("npl exposure " + id + ": gca must be non-negative");
    }
    check_unit_interval(lgd_unsecured, "lgd_unsecured");
    check_unit_interval(guarantor_pd, "guarantor_pd");
    if (!std::isfinite(collateral_value) || collateral_value < 0.0) {
        throw std::invalid_argument("npl exposure " + id +
                                    ": collateral value must be non-negative");
    }
    if (collateral_value > gca * (1.0 + 1e-12)) {
        throw std::invalid_argument("npl exposure " + id +
                                    ": collateral value exceeds the gross carrying amount");
    }
    for (double recovery : expected_recoveries) {
        if (!std::isfinite(recovery) || recovery < 0.0) {
            throw std::invalid_argument("npl exposure " + id +
                                        ": expected recoveries must be non-negative");
        }
    }
    if (!expected_recoveries.empty()) {
        const double pv = nca_from_recoveries();
        const double decomposed = decompose_nca(*this).nca();
        if (std::abs(pv - decomposed) > 1e-9 * std::max(1.0, gca)) {
            throw std::invalid_argument(
                "npl exposure " + id +
                ": recovery schedule and decomposition disagree on the net carrying amount");
        }
    }
}

NcaDecomposition decompose_nca(double gca, double collateral_value,
                               double lgd_unsecured, double guarantor_pd,
                               bool cured) {
    if (!std::isfinite(gca) || gca < 0.0) {
        throw std::invalid_argument("gca must be non-negative");
    }
    if (!std::isfinite(collateral_value) || collateral_value < 0.0) {
        throw std::invalid_argument("collateral value must be non-negative");
    }
    if (collateral_value > gca * (1.0 + 1e-12)) {
        throw std::invalid_argument("collateral value exceeds the gross carrying amount");
    }
    check_unit_interval(lgd_unsecured, "lgd_unsecured");
    check_unit_interval(guarantor_pd, "guarantor_pd");

    const double uncovered = std::max(0.0, gca - collateral_value);
    NcaDecomposition parts;
    parts.expected_loss = guarantor_pd * lgd_unsecured * uncovered;
    if (cured) {
        parts.cure = gca - parts.expected_loss;
    } else {
        parts.collateral = collateral_value;
        parts.unsecured = (1.0 - lgd_unsecured) * uncovered;
        parts.guarantee = (1.0 - guarantor_pd) * lgd_unsecured * uncovered;
    }
    return parts;
}

NcaDecomposition decompose_nca(const NplExposure& exposure) {
    return decompose_nca(exposure.gca, exposure.collateral_value,
                         exposure.lgd_unsecured, exposure.guarantor_pd,
                         exposure.cured);
}

double WorkoutState::nca() const {
    return present_value(expected_recoveries, rate);
}

WorkoutStep step_workout(WorkoutState& state, std::optional<double> realized,
                         double write_off) {
    if (!std::isfinite(write_off) || write_off < 0.0) {
        throw std::invalid_argument("write-off must be non-negative");
    }
    WorkoutStep step;
    step.nca_bop = state.nca();
    step.el_bop = state.gca - step.nca_bop;
    const double expected =
        state.expected_recoveries.empty() ? 0.0 : state.expected_recoveries.front();
    step.realized_recovery = realized.value_or(expected);
    if (!std::isfinite(step.realized_recovery) || step.realized_recovery < 0.0) {
        throw std::invalid_argument("realized recovery must be non-negative");
    }
    step.write_off = write_off;

    state.gca -= step.realized_recovery + write_off;
    if (state.convention == UnwindingConvention::nca_unwinding) {
        state.gca += state.rate * step.nca_bop;
    }
    if (!state.expected_recoveries.empty()) {
        state.expected_recoveries.erase(state.expected_recoveries.begin());
    }

    step.el_eop = state.gca - state.nca();
    step.dashboard = npl_dashboard(step.el_bop, step.el_eop, write_off);
    step.corrected = unwinding_correction(step.dashboard, state.rate, step.nca_bop);
    return step;
}

double npl_dashboard(double el_bop, double el_eop, double write_offs) {
    return el_eop + write_offs - el_bop;
}

double unwinding_correction(double raw_dashboard, double rate, double nca_bop) {
    return raw_dashboard + rate * nca_bop;
}

PoolAggregate aggregate(const PoolPeriod& period) {
    PoolAggregate total;
    for (const PoolMemberObservation& member : period.members) {
        const NcaDecomposition parts =
            decompose_nca(member.gca, member.collateral_value, member.lgd_unsecured,
                          member.guarantor_pd, member.cured);
        total.gca += member.gca;
        total.collateral += parts.collateral;
        total.unsecured += parts.unsecured;
        total.guarantee += parts.guarantee;
        total.cure += parts.cure;
        total.expected_loss += parts.expected_loss;
        total.write_offs += member.write_off;
    }
    return total;
}

void StaticPool::validate() const {
    if (!std::isfinite(discount_rate) || discount_rate <= -1.0) {
        throw std::invalid_argument("pool " + id + ": discount rate must exceed -1");
    }
    if (member_ids.empty()) {
        throw std::invalid_argument("pool " + id + ": no members");
    }
    std::unordered_set<std::string> known(member_ids.begin(), member_ids.end());
    if (known.size() != member_ids.size()) {
        throw std::invalid_argument("pool " + id + ": duplicate member ids");
    }
    if (history.empty()) {
        throw std::invalid_argument("pool " + id + ": no observations");
    }
    std::int64_t previous = history.front().as_of;
    for (std::size_t k = 0; k < history.size(); ++k) {
        const PoolPeriod& period = history[k];
        if (k > 0) {
            if (period.as_of != previous + 1) {
                throw std::invalid_argument("pool " + id +
                                            ": observation dates must advance by one period");
            }
            previous = period.as_of;
        }
        std::unordered_set<std::string> seen;
        for (const PoolMemberObservation& member : period.members) {
            if (!known.count(member.id)) {
                throw std::invalid_argument("pool " + id + ": id " + member.id +
                                            " is not a pool member (membership is frozen "
                                            "at formation)");
            }
            if (!seen.insert(member.id).second) {
                throw std::invalid_argument("pool " + id + ": id " + member.id +
                                            " observed twice at the same date");
            }
        }
    }
    for (const PoolMemberObservation& member : history.front().members) {
        if (member.write_off != 0.0) {
            throw std::invalid_argument("pool " + id +
                                        ": write-offs recorded at formation");
        }
    }
}

std::vector<TelPoint> static_pool_tel(const StaticPool& pool, std::size_t horizon) {
    pool.validate();
    const std::size_t points = std::min(pool.history.size(), horizon);
    if (points == 0) {
        return {};
    }

    std::vector<TelPoint> trace;
    trace.reserve(points);
    double write_offs_cum = 0.0;
    double interest_cum = 0.0;
    double dashboard_route = 0.0; // EL_0 + sum of corrected dashboards
    double previous_el = 0.0;
    double previous_nca = 0.0;
    double gca0 = 0.0;

    for (std::size_t k = 0; k < points; ++k) {
        const PoolAggregate parts = aggregate(pool.history[k]);
        TelPoint point;
        point.as_of = pool.history[k].as_of;
        point.parts = parts;
        point.el = parts.expected_loss;
        if (k == 0) {
            gca0 = parts.gca;
            dashboard_route = parts.expected_loss;
        } else {
            write_offs_cum += parts.write_offs;
            const double interest = pool.discount_rate * previous_nca;
            interest_cum += interest;
            point.dashboard = npl_dashboard(previous_el, parts.expected_loss, parts.write_offs);
            point.corrected =
                unwinding_correction(point.dashboard, pool.discount_rate, previous_nca);
            dashboard_route += point.corrected;
        }
        point.write_offs_cum = write_offs_cum;
        point.interest_cum = interest_cum;
        point.tel = parts.expected_loss + write_offs_cum + interest_cum;

        if (std::abs(point.tel - dashboard_route) > 1e-9 * std::max(1.0, gca0)) {
            throw std::runtime_error("pool " + pool.id +
                                     ": direct and dashboard total-expected-loss routes "
                                     "disagree beyond tolerance");
        }

        previous_el = parts.expected_loss;
        previous_nca = parts.nca();
        trace.push_back(point);
    }
    return trace;
}

std::vector<VintageRow> vintage_report(const StaticPool& pool) {
    const std::vector<TelPoint> trace = static_pool_tel(pool);
    if (trace.empty()) {
        return {};
    }
    const double gca0 = trace.front().parts.gca;

    std::vector<VintageRow> rows;
    rows.reserve(trace.size());
    for (const TelPoint& point : trace) {
        VintageRow row;
        row.as_of = point.as_of;
        row.write_offs_cum = point.write_offs_cum;
        row.expected_loss = point.el;
        row.interest_cum = point.interest_cum;
        row.tel = point.tel;
        row.unsecured = point.parts.unsecured;
        row.guarantee = point.parts.guarantee;
        row.collateral = point.parts.collateral;
        row.cure = point.parts.cure;
        row.gca = point.parts.gca;

        const double stack = row.expected_loss + row.unsecured + row.guarantee +
                             row.collateral + row.cure;
        if (std::abs(stack - row.gca) > 1e-6 * std::max(1.0, gca0)) {
            throw std::runtime_error("pool " + pool.id +
                                     ": carrying-amount stack does not reconcile to the "
                                     "gross amount");
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<WindowPoint> moving_window_monitor(std::span<const PoolPeriod> snapshots,
                                               const MonitorConfig& config) {
    if (config.window < 1) {
        throw std::invalid_argument("monitor window must be at least one period");
    }
    if (config.run_length < 2) {
        throw std::invalid_argument("trend run length must be at least two");
    }
    if (!std::isfinite(config.discount_rate) || config.discount_rate <= -1.0) {
        throw std::invalid_argument("monitor discount rate must exceed -1");
    }
    const std::size_t window = static_cast<std::size_t>(config.window);
    if (snapshots.size() <= window) {
        return {};
    }

    std::vector<WindowPoint> points;
    points.reserve(snapshots.size() - window);
    int run = 0;
    int run_sign = 0;

    for (std::size_t start = 0; start + window < snapshots.size(); ++start) {
        const PoolPeriod& bop = snapshots[start];
        std::unordered_set<std::string> old_ids;
        old_ids.reserve(bop.members.size());
        for (const PoolMemberObservation& member : bop.members) {
            old_ids.insert(member.id);
        }

        const auto restrict_to_old = [&old_ids](const PoolPeriod& period) {
            PoolPeriod subset;
            subset.as_of = period.as_of;
            for (const PoolMemberObservation& member : period.members) {
                if (old_ids.count(member.id)) {
                    subset.members.push_back(member);
                }
            }
            return subset;
        };

        const PoolAggregate before = aggregate(bop);
        const PoolAggregate after = aggregate(restrict_to_old(snapshots[start + window]));

        WindowPoint point;
        point.bop_as_of = bop.as_of;
        point.eop_as_of = snapshots[start + window].as_of;
        point.nca_bop = before.nca();

        double write_offs = 0.0;
        double interest = 0.0;
        for (std::size_t j = 0; j < window; ++j) {
            const PoolAggregate mid = aggregate(restrict_to_old(snapshots[start + j]));
            interest += config.discount_rate * mid.nca();
            write_offs += aggregate(restrict_to_old(snapshots[start + j + 1])).write_offs;
        }

        point.dashboard = npl_dashboard(before.expected_loss, after.expected_loss, write_offs);
        point.corrected = point.dashboard + interest;
        point.delta_collateral = after.collateral - before.collateral;
        point.delta_unsecured = after.unsecured - before.unsecured;
        point.delta_guarantee = after.guarantee - before.guarantee;
        point.delta_cure = after.cure - before.cure;

        const int sign = point.corrected > 0.0 ? 1 : (point.corrected < 0.0 ? -1 : 0);
        if (sign != 0 && sign == run_sign) {
            ++run;
        } else {
            run_sign = sign;
            run = sign == 0 ? 0 : 1;
        }
        point.trend_flag = run >= config.run_length;
        points.push_back(point);
    }
    return points;
}

} // namespace iacvlab
