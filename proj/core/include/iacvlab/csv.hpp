#pragma once

#include "iacvlab/cashflow.hpp"
#include "iacvlab/dashboards.hpp"
#include "iacvlab/manifest.hpp"
#include "iacvlab/npl.hpp"
#include "iacvlab/valuation.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace iacvlab::csv {

/// Schema or value error with file position; what() reads
/// "origin:line: message".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& origin, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

/// All files are UTF-8 comma-separated tables with an exact header row,
/// '.' decimal separator, '#' comment lines (skipped on read, used for
/// embedded manifests on write) and no quoting; field values must not
/// contain commas. Numbers are written in shortest round-trip form, so
/// reading back reproduces the double exactly.
std::string format_number(double value);

/// contracts(id,period_unit,principal,t,cf): one row per cash flow, t
/// running 1..T contiguously per contract; period-0 rows are rejected
/// (day-one flows belong in the principal).
std::vector<LoanContract> read_contracts(std::istream& in, const std::string& origin);
std::vector<LoanContract> read_contracts_file(const std::string& path);
void write_contracts(std::ostream& out, std::span<const LoanContract> contracts,
                     const RunManifest* manifest = nullptr);

struct NamedProfile {
    std::string id;
    RiskProfile profile;
};

/// profiles(id,t,R): expected loss R due at end of period t, t running
/// 1..T contiguously per id.
std::vector<NamedProfile> read_profiles(std::istream& in, const std::string& origin);
std::vector<NamedProfile> read_profiles_file(const std::string& path);
void write_profiles(std::ostream& out, std::span<const NamedProfile> profiles,
                    const RunManifest* manifest = nullptr);

/// snapshots(as_of,id,performing,ead,lgd,pd,el,wo_in_period,ead_def,lgd_def):
/// rows grouped contiguously by strictly increasing as_of; ead_def/lgd_def
/// blank when not applicable.
std::vector<PortfolioSnapshot> read_snapshots(std::istream& in, const std::string& origin);
std::vector<PortfolioSnapshot> read_snapshots_file(const std::string& path);
void write_snapshots(std::ostream& out, std::span<const PortfolioSnapshot> snapshots,
                     const RunManifest* manifest = nullptr);

/// pools(id,default_date): membership of one static pool; every member
/// must share the formation date.
struct PoolDefinition {
    std::vector<std::string> member_ids;
    std::int64_t default_date = 0;
};

PoolDefinition read_pool(std::istream& in, const std::string& origin);
PoolDefinition read_pool_file(const std::string& path);
void write_pool(std::ostream& out, const PoolDefinition& pool,
                const RunManifest* manifest = nullptr);

/// recoveries(id,t,rec): expected recovery schedules fixed at pool
/// formation, t running 1..m contiguously per id.
std::map<std::string, std::vector<double>> read_recoveries(std::istream& in,
                                                           const std::string& origin);
std::map<std::string, std::vector<double>> read_recoveries_file(const std::string& path);
void write_recoveries(std::ostream& out,
                      const std::map<std::string, std::vector<double>>& recoveries,
                      const RunManifest* manifest = nullptr);

/// observations(pool,as_of,id,gca,coll,lgd_u,guarantor_pd,cured,wo): one
/// defaulted-book observation per member and date, grouped contiguously
/// by strictly increasing as_of. All rows must name the same pool; the
/// pool id is returned through pool_id.
std::vector<PoolPeriod> read_observations(std::istream& in, const std::string& origin,
                                          std::string& pool_id);
std::vector<PoolPeriod> read_observations_file(const std::string& path,
                                               std::string& pool_id);
void write_observations(std::ostream& out, const std::string& pool_id,
                        std::span<const PoolPeriod> periods,
                        const RunManifest* manifest = nullptr);

/// trajectories(id,t,gca,iacv,nca,provision,el_12m,el_lifetime,bucket,
/// delta,effective_rate,risk_adjusted_rate): valuation output, one row
/// per loan and period; delta is the discounted conservatism at t.
void write_trajectories(std::ostream& out, std::span<const ExposureTrajectory> trajectories,
                        const RunManifest* manifest = nullptr);

/// vintage(as_of,component,amount): long-form stacked report, one row per
/// period and component.
void write_vintage(std::ostream& out, std::span<const VintageRow> rows,
                   const RunManifest* manifest = nullptr);

/// tel(as_of,el,write_offs_cum,interest_cum,tel,dashboard,corrected).
void write_tel(std::ostream& out, std::span<const TelPoint> trace,
               const RunManifest* manifest = nullptr);

} // namespace iacvlab::csv
