#include "iacvlab/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <system_error>

namespace iacvlab::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t begin = 0;
    while (true) {
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(begin));
            break;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
    return fields;
}

/// Line-oriented reader: skips blank and '#' lines, validates the header,
/// splits rows and tracks line numbers for diagnostics.
class TableReader {
public:
    TableReader(std::istream& in, std::string origin, const std::string& header)
        : in_(in), origin_(std::move(origin)) {
        std::string line;
        while (next_raw(line)) {
            if (line != header) {
                throw ParseError(origin_, line_, "expected header '" + header +
                                                     "', found '" + line + "'");
            }
            columns_ = split_fields(header).size();
            return;
        }
        throw ParseError(origin_, line_, "missing header '" + header + "'");
    }

    bool next(std::vector<std::string>& fields) {
        std::string line;
        if (!next_raw(line)) {
            return false;
        }
        fields = split_fields(line);
        if (fields.size() != columns_) {
            throw ParseError(origin_, line_,
                             "expected " + std::to_string(columns_) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        return true;
    }

    const std::string& origin() const { return origin_; }
    std::size_t line() const { return line_; }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(origin_, line_, message);
    }

private:
    bool next_raw(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty() || line.front() == '#') {
                continue;
            }
            return true;
        }
        return false;
    }

    std::istream& in_;
    std::string origin_;
    std::size_t line_ = 0;
    std::size_t columns_ = 0;
};

double parse_double_field(const TableReader& reader, const std::string& text,
                          const char* column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        reader.fail(std::string(column) + ": '" + text + "' is not a number");
    }
    return value;
}

std::int64_t parse_int_field(const TableReader& reader, const std::string& text,
                             const char* column) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        reader.fail(std::string(column) + ": '" + text + "' is not an integer");
    }
    return value;
}

bool parse_bool_field(const TableReader& reader, const std::string& text,
                      const char* column) {
    if (text == "1" || text == "true") {
        return true;
    }
    if (text == "0" || text == "false") {
        return false;
    }
    reader.fail(std::string(column) + ": '" + text + "' is not a boolean (0/1/true/false)");
}

void check_id(const TableReader& reader, const std::string& id) {
    if (id.empty()) {
        reader.fail("empty id");
    }
}

void write_preamble(std::ostream& out, const RunManifest* manifest,
                    const char* header) {
    if (manifest != nullptr) {
        for (const std::string& line : manifest->comment_lines()) {
            out << line << '\n';
        }
    }
    out << header << '\n';
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read input file: " + path);
    }
    return in;
}

} // namespace

ParseError::ParseError(const std::string& origin, std::size_t line,
                       const std::string& message)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": " + message),
      line_(line) {}

std::string format_number(double value) {
    char buffer[64];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general);
    if (ec != std::errc()) {
        return "nan";
    }
    return std::string(buffer, ptr);
}

std::vector<LoanContract> read_contracts(std::istream& in, const std::string& origin) {
    TableReader reader(in, origin, "id,period_unit,principal,t,cf");
    std::vector<LoanContract> contracts;
    std::set<std::string> finished;
    std::vector<std::string> fields;
    std::int64_t expected_t = 1;

    while (reader.next(fields)) {
        const std::string& id = fields[0];
        check_id(reader, id);

        PeriodUnit unit = PeriodUnit::year;
        if (fields[1] == "year") {
            unit = PeriodUnit::year;
        } else if (fields[1] == "month") {
            unit = PeriodUnit::month;
        } else {
            reader.fail("period_unit: '" + fields[1] + "' is not year or month");
        }
        const double principal = parse_double_field(reader, fields[2], "principal");
        const std::int64_t t = parse_int_field(reader, fields[3], "t");
        const double cf = parse_double_field(reader, fields[4], "cf");

        if (t == 0) {
            reader.fail("cash flows are indexed from period 1; net day-one flows "
                        "into the principal");
        }
        if (t < 0) {
            reader.fail("t must be positive");
        }

        if (contracts.empty() || contracts.back().id != id) {
            if (!finished.insert(id).second) {
                reader.fail("contract " + id + " appears in two separate blocks; "
                            "rows of one contract must be contiguous");
            }
            LoanContract contract;
            contract.id = id;
            contract.principal = principal;
            contract.period_unit = unit;
            contracts.push_back(std::move(contract));
            expected_t = 1;
        }

        LoanContract& contract = contracts.back();
        if (contract.principal != principal) {
            reader.fail("contract " + id + ": principal differs between rows");
        }
        if (contract.period_unit != unit) {
            reader.fail("contract " + id + ": period_unit differs between rows");
        }
        if (t != expected_t) {
            reader.fail("contract " + id + ": expected t=" + std::to_string(expected_t) +
                        ", found t=" + std::to_string(t) +
                        " (periods must run 1..T without gaps)");
        }
        contract.cash_flows.push_back(cf);
        ++expected_t;
    }

    for (const LoanContract& contract : contracts) {
        try {
            contract.validate();
        } catch (const std::invalid_argument& error) {
            throw ParseError(origin, 0,
                             "contract " + contract.id + ": " + error.what());
        }
    }
    return contracts;
}

std::vector<LoanContract> read_contracts_file(const std::string& path) {
    auto in = open_input(path);
    return read_contracts(in, path);
}

void write_contracts(std::ostream& out, std::span<const LoanContract> contracts,
                     const RunManifest* manifest) {
    write_preamble(out, manifest, "id,period_unit,principal,t,cf");
    for (const LoanContract& contract : contracts) {
        const char* unit = contract.period_unit == PeriodUnit::month ? "month" : "year";
        for (std::size_t k = 0; k < contract.cash_flows.size(); ++k) {
            out << contract.id << ',' << unit << ',' << format_number(contract.principal)
                << ',' << (k + 1) << ',' << format_number(contract.cash_flows[k]) << '\n';
        }
    }
}

std::vector<NamedProfile> read_profiles(std::istream& in, const std::string& origin) {
    TableReader reader(in, origin, "id,t,R");
    std::vector<NamedProfile> profiles;
    std::set<std::string> finished;
    std::vector<std::string> fields;
    std::int64_t expected_t = 1;

    while (reader.next(fields)) {
        const std::string& id = fields[0];
        check_id(reader, id);
        const std::int64_t t = parse_int_field(reader, fields[1], "t");
        const double loss = parse_double_field(reader, fields[2], "R");
        if (t < 1) {
            reader.fail("expected losses are indexed from period 1");
        }
        if (loss < 0.0) {
            reader.fail("profile " + id + ": expected losses must be non-negative");
        }

        if (profiles.empty() || profiles.back().id != id) {
            if (!finished.insert(id).second) {
                reader.fail("profile " + id + " appears in two separate blocks; "
                            "rows of one profile must be contiguous");
            }
            profiles.push_back(NamedProfile{id, {}});
            expected_t = 1;
        }
        if (t != expected_t) {
            reader.fail("profile " + id + ": expected t=" + std::to_string(expected_t) +
                        ", found t=" + std::to_string(t) +
                        " (periods must run 1..T without gaps)");
        }
        profiles.back().profile.expected_losses.push_back(loss);
        ++expected_t;
    }
    return profiles;
}

std::vector<NamedProfile> read_profiles_file(const std::string& path) {
    auto in = open_input(path);
    return read_profiles(in, path);
}

void write_profiles(std::ostream& out, std::span<const NamedProfile> profiles,
                    const RunManifest* manifest) {
    write_preamble(out, manifest, "id,t,R");
    for (const NamedProfile& entry : profiles) {
        for (std::size_t k = 0; k < entry.profile.expected_losses.size(); ++k) {
            out << entry.id << ',' << (k + 1) << ','
                << format_number(entry.profile.expected_losses[k]) << '\n';
        }
    }
}

std::vector<PortfolioSnapshot> read_snapshots(std::istream& in, const std::string& origin) {
    TableReader reader(in, origin,
                       "as_of,id,performing,ead,lgd,pd,el,wo_in_period,ead_def,lgd_def");
    std::vector<PortfolioSnapshot> snapshots;
    std::set<std::int64_t> finished;
    std::vector<std::string> fields;

    while (reader.next(fields)) {
        const std::int64_t as_of = parse_int_field(reader, fields[0], "as_of");
        ExposureRecord record;
        record.id = fields[1];
        check_id(reader, record.id);
        record.performing = parse_bool_field(reader, fields[2], "performing");
        record.ead = parse_double_field(reader, fields[3], "ead");
        record.lgd = parse_double_field(reader, fields[4], "lgd");
        record.pd = parse_double_field(reader, fields[5], "pd");
        record.el = parse_double_field(reader, fields[6], "el");
        record.wo_in_period = parse_double_field(reader, fields[7], "wo_in_period");
        if (!fields[8].empty()) {
            record.ead_at_default = parse_double_field(reader, fields[8], "ead_def");
        }
        if (!fields[9].empty()) {
            record.lgd_at_default = parse_double_field(reader, fields[9], "lgd_def");
        }

        if (snapshots.empty() || snapshots.back().as_of != as_of) {
            if (!finished.insert(as_of).second) {
                reader.fail("snapshot " + std::to_string(as_of) +
                            " appears in two separate blocks");
            }
            if (!snapshots.empty() && as_of < snapshots.back().as_of) {
                reader.fail("snapshots must be ordered by increasing as_of");
            }
            PortfolioSnapshot snapshot;
            snapshot.as_of = as_of;
            snapshots.push_back(std::move(snapshot));
        }
        snapshots.back().exposures.push_back(std::move(record));
    }

    for (const PortfolioSnapshot& snapshot : snapshots) {
        try {
            snapshot.validate();
        } catch (const std::invalid_argument& error) {
            throw ParseError(origin, 0,
                             "snapshot " + std::to_string(snapshot.as_of) + ": " +
                                 error.what());
        }
    }
    return snapshots;
}

std::vector<PortfolioSnapshot> read_snapshots_file(const std::string& path) {
    auto in = open_input(path);
    return read_snapshots(in, path);
}

void write_snapshots(std::ostream& out, std::span<const PortfolioSnapshot> snapshots,
                     const RunManifest* manifest) {
    write_preamble(out, manifest,
                   "as_of,id,performing,ead,lgd,pd,el,wo_in_period,ead_def,lgd_def");
    for (const PortfolioSnapshot& snapshot : snapshots) {
        for (const ExposureRecord& record : snapshot.exposures) {
            out << snapshot.as_of << ',' << record.id << ','
                << (record.performing ? '1' : '0') << ',' << format_number(record.ead)
                << ',' << format_number(record.lgd) << ',' << format_number(record.pd)
                << ',' << format_number(record.el) << ','
                << format_number(record.wo_in_period) << ',';
            if (record.ead_at_default) {
                out << format_number(*record.ead_at_default);
            }
            out << ',';
            if (record.lgd_at_default) {
                out << format_number(*record.lgd_at_default);
            }
            out << '\n';
        }
    }
}

PoolDefinition read_pool(std::istream& in, const std::string& origin) {
    TableReader reader(in, origin, "id,default_date");
    PoolDefinition pool;
    std::set<std::string> seen;
    std::vector<std::string> fields;
    bool first = true;

    while (reader.next(fields)) {
        check_id(reader, fields[0]);
        const std::int64_t date = parse_int_field(reader, fields[1], "default_date");
        if (first) {
            pool.default_date = date;
            first = false;
        } else if (date != pool.default_date) {
            reader.fail("members of a static pool must share the formation date");
        }
        if (!seen.insert(fields[0]).second) {
            reader.fail("duplicate pool member " + fields[0]);
        }
        pool.member_ids.push_back(fields[0]);
    }
    if (pool.member_ids.empty()) {
        throw ParseError(origin, reader.line(), "pool has no members");
    }
    return pool;
}

PoolDefinition read_pool_file(const std::string& path) {
    auto in = open_input(path);
    return read_pool(in, path);
}

void write_pool(std::ostream& out, const PoolDefinition& pool,
                const RunManifest* manifest) {
    write_preamble(out, manifest, "id,default_date");
    for (const std::string& id : pool.member_ids) {
        out << id << ',' << pool.default_date << '\n';
    }
}

std::map<std::string, std::vector<double>> read_recoveries(std::istream& in,
                                                           const std::string& origin) {
    TableReader reader(in, origin, "id,t,rec");
    std::map<std::string, std::vector<double>> recoveries;
    std::vector<std::string> fields;

    while (reader.next(fields)) {
        check_id(reader, fields[0]);
        const std::int64_t t = parse_int_field(reader, fields[1], "t");
        const double rec = parse_double_field(reader, fields[2], "rec");
        if (t < 1) {
            reader.fail("recoveries are indexed from period 1");
        }
        if (rec < 0.0) {
            reader.fail("expected recoveries must be non-negative");
        }
        std::vector<double>& schedule = recoveries[fields[0]];
        if (static_cast<std::size_t>(t) != schedule.size() + 1) {
            reader.fail("recovery schedule for " + fields[0] + ": expected t=" +
                        std::to_string(schedule.size() + 1) + ", found t=" +
                        std::to_string(t) + " (periods must run 1..m without gaps)");
        }
        schedule.push_back(rec);
    }
    return recoveries;
}

std::map<std::string, std::vector<double>> read_recoveries_file(const std::string& path) {
    auto in = open_input(path);
    return read_recoveries(in, path);
}

void write_recoveries(std::ostream& out,
                      const std::map<std::string, std::vector<double>>& recoveries,
                      const RunManifest* manifest) {
    write_preamble(out, manifest, "id,t,rec");
    for (const auto& [id, schedule] : recoveries) {
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            out << id << ',' << (k + 1) << ',' << format_number(schedule[k]) << '\n';
        }
    }
}

std::vector<PoolPeriod> read_observations(std::istream& in, const std::string& origin,
                                          std::string& pool_id) {
    TableReader reader(in, origin,
                       "pool,as_of,id,gca,coll,lgd_u,guarantor_pd,cured,wo");
    std::vector<PoolPeriod> periods;
    std::set<std::int64_t> finished;
    std::vector<std::string> fields;
    pool_id.clear();

    while (reader.next(fields)) {
        check_id(reader, fields[0]);
        if (pool_id.empty()) {
            pool_id = fields[0];
        } else if (fields[0] != pool_id) {
            reader.fail("observations mix pools '" + pool_id + "' and '" + fields[0] +
                        "'; one file describes one pool");
        }
        const std::int64_t as_of = parse_int_field(reader, fields[1], "as_of");
        PoolMemberObservation member;
        member.id = fields[2];
        check_id(reader, member.id);
        member.gca = parse_double_field(reader, fields[3], "gca");
        member.collateral_value = parse_double_field(reader, fields[4], "coll");
        member.lgd_unsecured = parse_double_field(reader, fields[5], "lgd_u");
        member.guarantor_pd = parse_double_field(reader, fields[6], "guarantor_pd");
        member.cured = parse_bool_field(reader, fields[7], "cured");
        member.write_off = parse_double_field(reader, fields[8], "wo");

        if (periods.empty() || periods.back().as_of != as_of) {
            if (!finished.insert(as_of).second) {
                reader.fail("observation date " + std::to_string(as_of) +
                            " appears in two separate blocks");
            }
            if (!periods.empty() && as_of < periods.back().as_of) {
                reader.fail("observations must be ordered by increasing as_of");
            }
            PoolPeriod period;
            period.as_of = as_of;
            periods.push_back(std::move(period));
        }
        periods.back().members.push_back(std::move(member));
    }
    return periods;
}

std::vector<PoolPeriod> read_observations_file(const std::string& path,
                                               std::string& pool_id) {
    auto in = open_input(path);
    return read_observations(in, path, pool_id);
}

void write_observations(std::ostream& out, const std::string& pool_id,
                        std::span<const PoolPeriod> periods,
                        const RunManifest* manifest) {
    write_preamble(out, manifest, "pool,as_of,id,gca,coll,lgd_u,guarantor_pd,cured,wo");
    for (const PoolPeriod& period : periods) {
        for (const PoolMemberObservation& member : period.members) {
            out << pool_id << ',' << period.as_of << ',' << member.id << ','
                << format_number(member.gca) << ',' << format_number(member.collateral_value)
                << ',' << format_number(member.lgd_unsecured) << ','
                << format_number(member.guarantor_pd) << ',' << (member.cured ? '1' : '0')
                << ',' << format_number(member.write_off) << '\n';
        }
    }
}

void write_trajectories(std::ostream& out, std::span<const ExposureTrajectory> trajectories,
                        const RunManifest* manifest) {
    write_preamble(out, manifest,
                   "id,t,gca,iacv,nca,provision,el_12m,el_lifetime,bucket,delta,"
                   "effective_rate,risk_adjusted_rate");
    for (const ExposureTrajectory& trajectory : trajectories) {
        for (std::size_t t = 0; t < trajectory.periods(); ++t) {
            out << trajectory.id << ',' << t << ',' << format_number(trajectory.gca[t])
                << ',' << format_number(trajectory.iacv[t]) << ','
                << format_number(trajectory.nca[t]) << ','
                << format_number(trajectory.provision[t]) << ','
                << format_number(trajectory.el_12m[t]) << ','
                << format_number(trajectory.el_lifetime[t]) << ',' << trajectory.bucket[t]
                << ',' << format_number(trajectory.delta0[t]) << ','
                << format_number(trajectory.effective.rate) << ','
                << format_number(trajectory.risk_adjusted.rate) << '\n';
        }
    }
}

void write_vintage(std::ostream& out, std::span<const VintageRow> rows,
                   const RunManifest* manifest) {
    write_preamble(out, manifest, "as_of,component,amount");
    for (const VintageRow& row : rows) {
        const std::pair<const char*, double> components[] = {
            {"write_offs_cum", row.write_offs_cum}, {"expected_loss", row.expected_loss},
            {"interest_cum", row.interest_cum},     {"tel", row.tel},
            {"unsecured", row.unsecured},           {"guarantee", row.guarantee},
            {"collateral", row.collateral},         {"cure", row.cure},
            {"gca", row.gca}};
        for (const auto& [name, amount] : components) {
            out << row.as_of << ',' << name << ',' << format_number(amount) << '\n';
        }
    }
}

void write_tel(std::ostream& out, std::span<const TelPoint> trace,
               const RunManifest* manifest) {
    write_preamble(out, manifest,
                   "as_of,el,write_offs_cum,interest_cum,tel,dashboard,corrected");
    for (const TelPoint& point : trace) {
        out << point.as_of << ',' << format_number(point.el) << ','
            << format_number(point.write_offs_cum) << ','
            << format_number(point.interest_cum) << ',' << format_number(point.tel)
            << ',' << format_number(point.dashboard) << ','
            << format_number(point.corrected) << '\n';
    }
}

} // namespace iacvlab::csv
