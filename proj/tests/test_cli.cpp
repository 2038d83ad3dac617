#include "iacvlab/config.hpp"
#include "iacvlab/csv.hpp"
#include "iacvlab/manifest.hpp"
#include "iacvlab/valuation.hpp"

#include "support/subprocess.hpp"

#include <doctest.h>

#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace iacvlab;
using testsupport::read_file;
using testsupport::run_cli;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

/// Scoped environment variable, restored (to unset) on destruction.
class EnvGuard {
public:
    EnvGuard(const char* name, const char* value) : name_(name) {
        ::setenv(name, value, 1);
    }
    ~EnvGuard() { ::unsetenv(name_); }
    EnvGuard(const EnvGuard&) = delete;
    EnvGuard& operator=(const EnvGuard&) = delete;

private:
    const char* name_;
};

/// metric -> value text from a `--format csv` report body.
std::map<std::string, std::string> parse_metrics(const std::string& text) {
    std::map<std::string, std::string> metrics;
    std::istringstream in(text);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!seen_header) {
            REQUIRE(line == "metric,value");
            seen_header = true;
            continue;
        }
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        metrics[line.substr(0, comma)] = line.substr(comma + 1);
    }
    REQUIRE(seen_header);
    return metrics;
}

const std::string kContractsCsv = "id,period_unit,principal,t,cf\n"
                                  "loan1,year,100,1,5\n"
                                  "loan1,year,100,2,5\n"
                                  "loan1,year,100,3,105\n";

const std::string kProfilesCsv = "id,t,R\n"
                                 "loan1,1,1\n"
                                 "loan1,2,1\n"
                                 "loan1,3,1\n";

const std::string kSnapshotsBop =
    "as_of,id,performing,ead,lgd,pd,el,wo_in_period,ead_def,lgd_def\n"
    "0,e1,1,100,0.4,0.75,30,0,,\n";

const std::string kSnapshotsEop =
    "as_of,id,performing,ead,lgd,pd,el,wo_in_period,ead_def,lgd_def\n"
    "1,e1,0,110,0.45,1,49.5,0,110,0.4\n";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("argument parsing exits 2 on misuse and 0 on help") {
    TempDir dir("cli-args");
    CHECK(run_cli("", dir).exit_code == 2);                // a subcommand is required
    CHECK(run_cli("value", dir).exit_code == 2);           // missing required options
    CHECK(run_cli("frobnicate", dir).exit_code == 2);      // unknown subcommand
    const auto help = run_cli("--help", dir);
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("value") != std::string::npos);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("value reproduces the library computation byte for byte") {
    EnvGuard stamp("IACVLAB_TIMESTAMP", "t0");
    TempDir dir("cli-value");
    write_file(dir.file("contracts.csv"), kContractsCsv);
    write_file(dir.file("profiles.csv"), kProfilesCsv);

    const auto run =
        run_cli("value --contracts contracts.csv --profiles profiles.csv --out traj.csv",
                dir);
    CAPTURE(run.err);
    REQUIRE(run.exit_code == 0);
    CHECK(run.err.empty());

    // Expected bytes straight from the library, including the manifest.
    std::istringstream contracts_in(kContractsCsv);
    std::istringstream profiles_in(kProfilesCsv);
    const auto contracts = csv::read_contracts(contracts_in, "contracts.csv");
    const auto profiles = csv::read_profiles(profiles_in, "profiles.csv");
    std::vector<ExposureTrajectory> trajectories;
    for (const LoanContract& contract : contracts) {
        trajectories.push_back(build_trajectory(contract, profiles[0].profile, {}));
    }
    RunManifest manifest;
    manifest.command = "value --contracts contracts.csv --profiles profiles.csv";
    manifest.input_digests = {{"contracts.csv", fnv1a_digest(kContractsCsv)},
                              {"profiles.csv", fnv1a_digest(kProfilesCsv)}};
    Config config;
    config.apply_env_overrides();
    manifest.config_digest = config.digest();
    manifest.timestamp = "t0";
    std::ostringstream expected;
    csv::write_trajectories(expected, trajectories, &manifest);

    CHECK(read_file(dir.file("traj.csv")) == expected.str());

    SUBCASE("stdout carries the same bytes as --out") {
        const auto to_stdout =
            run_cli("value --contracts contracts.csv --profiles profiles.csv", dir);
        REQUIRE(to_stdout.exit_code == 0);
        CHECK(to_stdout.out == expected.str());
    }
    SUBCASE("re-running is byte-identical") {
        const auto again = run_cli(
            "value --contracts contracts.csv --profiles profiles.csv --out traj2.csv",
            dir);
        REQUIRE(again.exit_code == 0);
        CHECK(read_file(dir.file("traj2.csv")) == read_file(dir.file("traj.csv")));
    }
}

TEST_CASE("value surfaces rate ambiguity as a warning") {
    TempDir dir("cli-amb");
    // Contractual flows stay non-negative (the schema requires it), but the
    // expected flows 60, -40, 80 change sign twice, so the risk-adjusted
    // root need not be unique.
    write_file(dir.file("contracts.csv"), "id,period_unit,principal,t,cf\n"
                                          "amb,year,100,1,60\n"
                                          "amb,year,100,2,10\n"
                                          "amb,year,100,3,80\n");
    write_file(dir.file("profiles.csv"), "id,t,R\n"
                                         "amb,1,0\n"
                                         "amb,2,50\n"
                                         "amb,3,0\n");

    const auto relaxed =
        run_cli("value --contracts contracts.csv --profiles profiles.csv --out t.csv", dir);
    CHECK(relaxed.exit_code == 0);
    CHECK(relaxed.err.find("warning:") != std::string::npos);
    CHECK(relaxed.err.find("several risk-adjusted rates") != std::string::npos);

    const auto strict = run_cli(
        "value --contracts contracts.csv --profiles profiles.csv --out t.csv --strict",
        dir);
    CHECK(strict.exit_code == 1);
}

TEST_CASE("value fails cleanly on broken inputs") {
    TempDir dir("cli-valerr");
    write_file(dir.file("contracts.csv"), kContractsCsv);
    write_file(dir.file("profiles.csv"), "id,t,R\nother,1,1\n");
    const auto missing =
        run_cli("value --contracts contracts.csv --profiles profiles.csv", dir);
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("no risk profile for contract loan1") != std::string::npos);

    write_file(dir.file("broken.csv"), "id,period_unit,principal,t,cf\n"
                                       "a,year,100,2,5\n");
    const auto schema =
        run_cli("value --contracts broken.csv --profiles profiles.csv", dir);
    CHECK(schema.exit_code == 2);
    CHECK(schema.err.find("broken.csv:2") != std::string::npos);

    const auto absent =
        run_cli("value --contracts nope.csv --profiles profiles.csv", dir);
    CHECK(absent.exit_code == 2);
}

TEST_CASE("dashboard reports the worked PD/EAD/LGD split") {
    TempDir dir("cli-dash");
    write_file(dir.file("bop.csv"), kSnapshotsBop);
    write_file(dir.file("eop.csv"), kSnapshotsEop);

    const auto run = run_cli(
        "dashboard --bop bop.csv --eop eop.csv --split --format csv --out d.csv", dir);
    CAPTURE(run.err);
    REQUIRE(run.exit_code == 0);

    const auto metrics = parse_metrics(read_file(dir.file("d.csv")));
    CHECK(metrics.at("pl_dashboard") == "19.5");
    CHECK(metrics.at("delta_pd") == "10");
    CHECK(metrics.at("delta_ead") == "4");
    CHECK(metrics.at("delta_lgd") == "5.5");
    CHECK(metrics.at("split_residual") == "0");
    CHECK(metrics.at("el_bop") == "30");
    CHECK(metrics.at("el_eop") == "49.5");
    CHECK(metrics.at("ior") == "19.5");
    CHECK(metrics.at("ior_residual") == "0");

    SUBCASE("table format renders the same numbers") {
        const auto table =
            run_cli("dashboard --bop bop.csv --eop eop.csv --split --out t.txt", dir);
        REQUIRE(table.exit_code == 0);
        const std::string text = read_file(dir.file("t.txt"));
        CHECK(text.find("impairment dashboard") == 0);
        CHECK(text.find("delta_lgd") != std::string::npos);
        CHECK(text.find("19.5") != std::string::npos);
        CHECK(text.find("# manifest command: dashboard") != std::string::npos);
    }
    SUBCASE("re-running is byte-identical") {
        const auto again = run_cli(
            "dashboard --bop bop.csv --eop eop.csv --split --format csv --out d2.csv",
            dir);
        REQUIRE(again.exit_code == 0);
        CHECK(read_file(dir.file("d2.csv")) == read_file(dir.file("d.csv")));
    }
    SUBCASE("invalid format flag") {
        CHECK(run_cli("dashboard --bop bop.csv --eop eop.csv --format xml", dir)
                  .exit_code == 2);
    }
    SUBCASE("snapshot files must hold exactly one date") {
        write_file(dir.file("two.csv"), kSnapshotsBop +
                                            "1,e1,1,100,0.4,0.75,30,0,,\n");
        const auto two = run_cli("dashboard --bop two.csv --eop eop.csv", dir);
        CHECK(two.exit_code == 2);
        CHECK(two.err.find("exactly one as_of") != std::string::npos);
    }
}

TEST_CASE("dashboard warns when the split lacks default-time data") {
    TempDir dir("cli-partial");
    write_file(dir.file("bop.csv"), kSnapshotsBop);
    write_file(dir.file("eop.csv"),
               "as_of,id,performing,ead,lgd,pd,el,wo_in_period,ead_def,lgd_def\n"
               "1,e1,0,110,0.45,1,49.5,0,,\n");

    const auto relaxed =
        run_cli("dashboard --bop bop.csv --eop eop.csv --split --format csv", dir);
    CHECK(relaxed.exit_code == 0);
    CHECK(relaxed.err.find("partial split") != std::string::npos);
    const auto metrics = parse_metrics(relaxed.out);
    // The whole movement beyond the BOP estimate lands in the residual.
    CHECK(metrics.at("delta_pd") == "10");
    CHECK(metrics.at("delta_ead") == "0");
    CHECK(metrics.at("delta_lgd") == "0");
    CHECK(metrics.at("split_residual") == "9.5");

    const auto strict = run_cli(
        "dashboard --bop bop.csv --eop eop.csv --split --format csv --strict", dir);
    CHECK(strict.exit_code == 1);
}

TEST_CASE("simulate emits readable books for every figure preset") {
    EnvGuard stamp("IACVLAB_TIMESTAMP", "t0");

    SUBCASE("performing book with snapshots") {
        TempDir dir("cli-sim-book");
        const auto run = run_cli("simulate --figure fig4_1 --periods 6 --out-dir .", dir);
        CAPTURE(run.err);
        REQUIRE(run.exit_code == 0);

        const auto contracts = csv::read_contracts_file(dir.file("contracts.csv").string());
        REQUIRE(contracts.size() == 1);
        CHECK(contracts[0].cash_flows.size() == 5);
        const auto profiles = csv::read_profiles_file(dir.file("profiles.csv").string());
        REQUIRE(profiles.size() == 1);
        CHECK(profiles[0].profile.expected_losses[0] == 0.0); // delayed hazard
        const auto snapshots = csv::read_snapshots_file(dir.file("snapshots.csv").string());
        CHECK(snapshots.size() == 7);
        CHECK(snapshots.front().as_of == 0);
        CHECK(snapshots.back().as_of == 6);

        const auto value = run_cli(
            "value --contracts contracts.csv --profiles profiles.csv --out traj.csv", dir);
        CAPTURE(value.err);
        CHECK(value.exit_code == 0); // the tool can consume its own output

        const std::string first = read_file(dir.file("contracts.csv"));
        const auto again = run_cli("simulate --figure fig4_1 --periods 6 --out-dir again", dir);
        REQUIRE(again.exit_code == 0);
        CHECK(read_file(dir.file("again/contracts.csv")) == first);
        CHECK(read_file(dir.file("again/snapshots.csv")) ==
              read_file(dir.file("snapshots.csv")));
    }

    SUBCASE("static pool") {
        TempDir dir("cli-sim-pool");
        const auto run = run_cli("simulate --figure fig7_1 --out-dir .", dir);
        CAPTURE(run.err);
        REQUIRE(run.exit_code == 0);
        const auto pool = csv::read_pool_file(dir.file("pool.csv").string());
        CHECK(pool.member_ids.size() == 100);
        CHECK(pool.default_date == 0);
        const auto recoveries =
            csv::read_recoveries_file(dir.file("recoveries.csv").string());
        CHECK(recoveries.size() == 100);
        std::string pool_id;
        const auto observations =
            csv::read_observations_file(dir.file("observations.csv").string(), pool_id);
        CHECK(pool_id == "pool1");
        CHECK(observations.size() == 7);
    }

    SUBCASE("open defaulted book") {
        TempDir dir("cli-sim-npl");
        const auto run = run_cli("simulate --figure fig7_2 --periods 24 --out-dir .", dir);
        CAPTURE(run.err);
        REQUIRE(run.exit_code == 0);
        std::string pool_id;
        const auto observations =
            csv::read_observations_file(dir.file("observations.csv").string(), pool_id);
        CHECK(pool_id == "book");
        CHECK(observations.size() == 24);
        CHECK(observations[0].members.size() == 20);
        CHECK(observations[5].members.size() == 120);
    }
}

TEST_CASE("simulate accepts scenario files and validates them") {
    EnvGuard stamp("IACVLAB_TIMESTAMP", "t0");
    TempDir dir("cli-sim-cfg");
    write_file(dir.file("scenario.ini"), "[scenario]\n"
                                         "kind = static_pool\n"
                                         "seed = 3\n"
                                         "n_exposures = 4\n"
                                         "recovery_timing = 0.6,0.4\n"
                                         "collateral_fraction = 0.2\n"
                                         "lgd_unsecured = 0.4\n");
    const auto run = run_cli("simulate --scenario scenario.ini --out-dir pool", dir);
    CAPTURE(run.err);
    REQUIRE(run.exit_code == 0);
    const auto pool = csv::read_pool_file(dir.file("pool/pool.csv").string());
    CHECK(pool.member_ids.size() == 4);

    SUBCASE("misuse exits 2") {
        CHECK(run_cli("simulate", dir).exit_code == 2);
        CHECK(run_cli("simulate --figure fig4_1 --scenario scenario.ini", dir).exit_code ==
              2);
        CHECK(run_cli("simulate --figure fig9_9", dir).exit_code == 2);
        CHECK(run_cli("simulate --figure fig4_1 --periods -3", dir).exit_code == 2);
        write_file(dir.file("typo.ini"), "[scenario]\nsede = 3\n");
        const auto typo = run_cli("simulate --scenario typo.ini", dir);
        CHECK(typo.exit_code == 2);
        CHECK(typo.err.find("unknown scenario config key") != std::string::npos);
        write_file(dir.file("badkind.ini"), "[scenario]\nkind = parquet\n");
        const auto badkind = run_cli("simulate --scenario badkind.ini", dir);
        CHECK(badkind.exit_code == 2);
        CHECK(badkind.err.find("scenario.kind") != std::string::npos);
    }
}

TEST_CASE("vintage consumes a simulated pool and stays flat") {
    EnvGuard stamp("IACVLAB_TIMESTAMP", "t0");
    TempDir dir("cli-vintage");
    REQUIRE(run_cli("simulate --figure fig7_1 --out-dir .", dir).exit_code == 0);

    const auto run = run_cli("vintage --pool pool.csv --recoveries recoveries.csv "
                             "--observations observations.csv --out-dir out --strict",
                             dir);
    CAPTURE(run.err);
    REQUIRE(run.exit_code == 0); // the cross-check finds nothing to warn about
    CHECK(run.err.empty());

    const std::string tel_text = read_file(dir.file("out/tel.csv"));
    std::istringstream tel_in(tel_text);
    std::string line;
    double first_tel = 0.0;
    double last_tel = 0.0;
    double gca0 = 0.0;
    bool have_first = false;
    while (std::getline(tel_in, line)) {
        if (line.empty() || line.front() == '#' || line.substr(0, 5) == "as_of") {
            continue;
        }
        std::istringstream fields(line);
        std::string cell;
        std::vector<std::string> row;
        while (std::getline(fields, cell, ',')) {
            row.push_back(cell);
        }
        REQUIRE(row.size() == 7);
        const double tel = std::stod(row[4]);
        if (!have_first) {
            first_tel = tel;
            gca0 = std::stod(row[1]); // at formation el = tel and gca-scale data
            have_first = true;
        }
        last_tel = tel;
    }
    REQUIRE(have_first);
    CHECK(std::abs(last_tel - first_tel) <= 1e-6 * std::max(1.0, gca0 + first_tel));

    const std::string vintage_text = read_file(dir.file("out/vintage.csv"));
    CHECK(vintage_text.find("as_of,component,amount") != std::string::npos);
    CHECK(vintage_text.find(",cure,") != std::string::npos);

    SUBCASE("re-running is byte-identical") {
        REQUIRE(run_cli("vintage --pool pool.csv --recoveries recoveries.csv "
                        "--observations observations.csv --out-dir out2",
                        dir)
                    .exit_code == 0);
        CHECK(read_file(dir.file("out2/tel.csv")) == read_file(dir.file("out/tel.csv")));
        CHECK(read_file(dir.file("out2/vintage.csv")) ==
              read_file(dir.file("out/vintage.csv")));
    }
}

TEST_CASE("vintage diagnostics") {
    TempDir dir("cli-vfail");
    write_file(dir.file("pool.csv"), "id,default_date\nw1,0\n");
    write_file(dir.file("recoveries.csv"), "id,t,rec\nw1,1,50\n");
    write_file(dir.file("observations.csv"),
               "pool,as_of,id,gca,coll,lgd_u,guarantor_pd,cured,wo\n"
               "p,0,w1,100,0,0.5,1,0,0\n"
               "p,1,w1,50,0,1,1,0,0\n");
    write_file(dir.file("flat.ini"), "[vintage]\ndiscount_rate = 0\n");

    SUBCASE("clean run at a zero discount rate") {
        const auto run = run_cli("vintage --pool pool.csv --recoveries recoveries.csv "
                                 "--observations observations.csv --config flat.ini "
                                 "--out-dir out --strict",
                                 dir);
        CAPTURE(run.err);
        CHECK(run.exit_code == 0);
    }
    SUBCASE("schedules for unknown members are flagged") {
        write_file(dir.file("recoveries.csv"), "id,t,rec\nw1,1,50\nghost,1,5\n");
        const auto relaxed =
            run_cli("vintage --pool pool.csv --recoveries recoveries.csv "
                    "--observations observations.csv --config flat.ini --out-dir out",
                    dir);
        CHECK(relaxed.exit_code == 0);
        CHECK(relaxed.err.find("not a pool member") != std::string::npos);
        const auto strict =
            run_cli("vintage --pool pool.csv --recoveries recoveries.csv "
                    "--observations observations.csv --config flat.ini --out-dir out "
                    "--strict",
                    dir);
        CHECK(strict.exit_code == 1);
    }
    SUBCASE("formation date must match the membership file") {
        write_file(dir.file("late.csv"), "id,default_date\nw1,1\n");
        const auto run = run_cli("vintage --pool late.csv --recoveries recoveries.csv "
                                 "--observations observations.csv --config flat.ini",
                                 dir);
        CHECK(run.exit_code == 2);
        CHECK(run.err.find("formation date") != std::string::npos);
    }
    SUBCASE("observations of non-members are a pool violation") {
        write_file(dir.file("observations.csv"),
                   "pool,as_of,id,gca,coll,lgd_u,guarantor_pd,cured,wo\n"
                   "p,0,w1,100,0,0.5,1,0,0\n"
                   "p,0,w2,80,0,0.5,1,0,0\n");
        const auto run = run_cli("vintage --pool pool.csv --recoveries recoveries.csv "
                                 "--observations observations.csv --config flat.ini",
                                 dir);
        CHECK(run.exit_code == 2);
        CHECK(run.err.find("not a pool member") != std::string::npos);
    }
}

TEST_CASE("pinned timestamps flow into every report") {
    EnvGuard stamp("IACVLAB_TIMESTAMP", "2026-01-01T00:00:00Z");
    TempDir dir("cli-stamp");
    write_file(dir.file("contracts.csv"), kContractsCsv);
    write_file(dir.file("profiles.csv"), kProfilesCsv);
    const auto run =
        run_cli("value --contracts contracts.csv --profiles profiles.csv", dir);
    REQUIRE(run.exit_code == 0);
    CHECK(run.out.find("# manifest timestamp: 2026-01-01T00:00:00Z") != std::string::npos);
}

} // TEST_SUITE("cli")
