#include "commands.hpp"

#include "report.hpp"

#include "iacvlab/config.hpp"
#include "iacvlab/csv.hpp"
#include "iacvlab/dashboards.hpp"
#include "iacvlab/manifest.hpp"
#include "iacvlab/npl.hpp"
#include "iacvlab/simulator.hpp"
#include "iacvlab/valuation.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace iacvlab::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
    bool strict = false;
    std::vector<std::string> warnings;

    void warn(std::string message) { warnings.push_back(std::move(message)); }

    int finish() const {
        for (const std::string& message : warnings) {
            std::cerr << "warning: " << message << '\n';
        }
        return strict && !warnings.empty() ? 1 : 0;
    }
};

Config load_config(const std::string& path) {
    Config config;
    if (!path.empty()) {
        config = Config::load(path);
    }
    config.apply_env_overrides();
    return config;
}

void add_input(RunManifest& manifest, const std::string& path) {
    manifest.input_digests.emplace_back(path, fnv1a_file_digest(path));
}

/// Writes through `body` to the given file, or to stdout when the path is
/// empty. Output location never enters the manifest, so report bytes do
/// not depend on where they land.
void write_output(const std::string& path,
                  const std::function<void(std::ostream&)>& body) {
    if (path.empty()) {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write output file: " + path);
    }
    body(out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed while writing output file: " + path);
    }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    write_output(path.string(), body);
}

// ---------------------------------------------------------------- value

struct ValueArgs {
    std::string contracts;
    std::string profiles;
    std::string config;
    std::string out;
};

int cmd_value(const ValueArgs& args, Context& context) {
    const Config config = load_config(args.config);
    const std::vector<LoanContract> contracts = csv::read_contracts_file(args.contracts);
    const std::vector<csv::NamedProfile> profiles = csv::read_profiles_file(args.profiles);

    std::map<std::string, const RiskProfile*> profile_by_id;
    for (const csv::NamedProfile& entry : profiles) {
        profile_by_id[entry.id] = &entry.profile;
    }

    TrajectoryOptions options;
    const std::string basis = config.get_string("valuation.provision_basis", "annualized");
    if (basis == "annualized") {
        options.provision_basis = ProvisionBasis::annualized_risk_level;
    } else if (basis == "next_period") {
        options.provision_basis = ProvisionBasis::next_period_loss;
    } else {
        throw std::invalid_argument("config key valuation.provision_basis: '" + basis +
                                    "' is not annualized or next_period");
    }

    std::vector<ExposureTrajectory> trajectories;
    trajectories.reserve(contracts.size());
    for (const LoanContract& contract : contracts) {
        const auto it = profile_by_id.find(contract.id);
        if (it == profile_by_id.end()) {
            throw std::runtime_error("no risk profile for contract " + contract.id);
        }
        try {
            trajectories.push_back(build_trajectory(contract, *it->second, options));
        } catch (const std::exception& error) {
            throw std::runtime_error("contract " + contract.id + ": " + error.what());
        }
        const ExposureTrajectory& trajectory = trajectories.back();
        if (trajectory.effective.ambiguous) {
            context.warn("contract " + contract.id +
                         ": several rates equate the contractual flows to the "
                         "principal; reported the lowest in the bracket");
        }
        if (trajectory.risk_adjusted.ambiguous) {
            context.warn("contract " + contract.id +
                         ": several risk-adjusted rates fit the expected flows; "
                         "reported the lowest in the bracket");
        }
    }

    RunManifest manifest;
    manifest.command = "value --contracts " + args.contracts + " --profiles " + args.profiles;
    if (!args.config.empty()) {
        manifest.command += " --config " + args.config;
    }
    add_input(manifest, args.contracts);
    add_input(manifest, args.profiles);
    if (!args.config.empty()) {
        add_input(manifest, args.config);
    }
    manifest.config_digest = config.digest();
    manifest.timestamp = manifest_timestamp();

    write_output(args.out, [&](std::ostream& out) {
        csv::write_trajectories(out, trajectories, &manifest);
    });
    return context.finish();
}

// ------------------------------------------------------------ dashboard

struct DashboardArgs {
    std::string bop;
    std::string eop;
    std::string config;
    std::string out;
    std::string format = "table";
    bool monthly = false;
    bool split = false;
};

PortfolioSnapshot read_single_snapshot(const std::string& path) {
    std::vector<PortfolioSnapshot> snapshots = csv::read_snapshots_file(path);
    if (snapshots.size() != 1) {
        throw std::runtime_error(path + ": expected exactly one as_of per file, found " +
                                 std::to_string(snapshots.size()));
    }
    return std::move(snapshots.front());
}

int cmd_dashboard(const DashboardArgs& args, Context& context) {
    if (args.format != "table" && args.format != "csv") {
        throw std::invalid_argument("--format must be table or csv");
    }
    const Config config = load_config(args.config);
    const PortfolioSnapshot bop = read_single_snapshot(args.bop);
    const PortfolioSnapshot eop = read_single_snapshot(args.eop);

    const double pl =
        args.monthly ? monthly_pl_dashboard(bop, eop) : pl_dashboard(bop, eop);
    const double ior =
        ior_from_el(eop.total_el(), bop.total_el(), eop.total_write_offs());
    const IorDecomposition decomposition = ior_decomposition(bop, eop);

    // Snapshots carry no separate provision column: the book is provisioned
    // at full expected loss, so the cost of risk equals the impact of risk
    // and the regulatory shortfall change is zero.
    const double cor = ior;
    const double delta_shortfall = 0.0;

    std::vector<report::Metric> metrics = {
        {"el_bop", bop.total_el()},
        {"el_eop", eop.total_el()},
        {"write_offs", eop.total_write_offs()},
        {"ior", ior},
        {"cor", cor},
        {"delta_shortfall", delta_shortfall},
        {"pl_dashboard", pl},
    };
    if (args.split) {
        const PlSplit split = pl_split(bop, eop);
        metrics.push_back({"delta_pd", split.delta_pd});
        metrics.push_back({"delta_ead", split.delta_ead});
        metrics.push_back({"delta_lgd", split.delta_lgd});
        metrics.push_back({"split_residual", split.residual});
        if (split.partial()) {
            context.warn("partial split: " + std::to_string(split.missing_default_data) +
                         " newly defaulted exposure(s) lack at-default data; their "
                         "movement is reported in split_residual");
        }
    }
    metrics.push_back({"el_pl_eop", decomposition.el_pl_eop});
    metrics.push_back({"npl_dashboard", decomposition.npl_dashboard});
    metrics.push_back({"ior_residual", decomposition.residual});

    RunManifest manifest;
    manifest.command = "dashboard --bop " + args.bop + " --eop " + args.eop;
    if (!args.config.empty()) {
        manifest.command += " --config " + args.config;
    }
    if (args.monthly) {
        manifest.command += " --monthly";
    }
    if (args.split) {
        manifest.command += " --split";
    }
    manifest.command += " --format " + args.format;
    add_input(manifest, args.bop);
    add_input(manifest, args.eop);
    if (!args.config.empty()) {
        add_input(manifest, args.config);
    }
    manifest.config_digest = config.digest();
    manifest.timestamp = manifest_timestamp();

    write_output(args.out, [&](std::ostream& out) {
        if (args.format == "csv") {
            report::render_csv(out, metrics, manifest);
        } else {
            const std::string title = args.monthly ? "impairment dashboard (monthly)"
                                                   : "impairment dashboard";
            report::render_table(out, title, metrics, manifest);
        }
    });
    return context.finish();
}

// -------------------------------------------------------------- vintage

struct VintageArgs {
    std::string pool;
    std::string recoveries;
    std::string observations;
    std::string config;
    std::string out_dir = ".";
};

int cmd_vintage(const VintageArgs& args, Context& context) {
    const Config config = load_config(args.config);
    const csv::PoolDefinition definition = csv::read_pool_file(args.pool);
    const std::map<std::string, std::vector<double>> recoveries =
        csv::read_recoveries_file(args.recoveries);
    std::string pool_id;
    std::vector<PoolPeriod> history =
        csv::read_observations_file(args.observations, pool_id);
    if (history.empty()) {
        throw std::runtime_error(args.observations + ": no observations");
    }

    StaticPool pool;
    pool.id = pool_id;
    pool.discount_rate = config.get_double("vintage.discount_rate", 0.05);
    pool.member_ids = definition.member_ids;
    pool.history = std::move(history);
    if (pool.history.front().as_of != definition.default_date) {
        throw std::runtime_error(
            "first observation (as_of " + std::to_string(pool.history.front().as_of) +
            ") must be at the pool formation date (" +
            std::to_string(definition.default_date) + ")");
    }
    pool.validate();

    // Cross-check the recovery schedules against the formation observation:
    // the present value of each member's expected recoveries must match the
    // net carrying amount implied by its decomposition.
    for (const PoolMemberObservation& member : pool.history.front().members) {
        const auto schedule = recoveries.find(member.id);
        if (schedule == recoveries.end()) {
            continue;
        }
        NplExposure exposure;
        exposure.id = member.id;
        exposure.gca = member.gca;
        exposure.expected_recoveries = schedule->second;
        exposure.collateral_value = member.collateral_value;
        exposure.lgd_unsecured = member.lgd_unsecured;
        exposure.guarantor_pd = member.guarantor_pd;
        exposure.cured = member.cured;
        exposure.effective_rate = pool.discount_rate;
        try {
            exposure.validate();
        } catch (const std::invalid_argument& error) {
            context.warn(std::string(error.what()));
        }
    }
    for (const auto& [id, schedule] : recoveries) {
        if (std::find(pool.member_ids.begin(), pool.member_ids.end(), id) ==
            pool.member_ids.end()) {
            context.warn("recovery schedule for " + id +
                         " ignored: not a pool member");
        }
    }

    const std::vector<TelPoint> trace = static_pool_tel(pool);
    const std::vector<VintageRow> rows = vintage_report(pool);

    RunManifest manifest;
    manifest.command = "vintage --pool " + args.pool + " --recoveries " + args.recoveries +
                       " --observations " + args.observations;
    if (!args.config.empty()) {
        manifest.command += " --config " + args.config;
    }
    add_input(manifest, args.pool);
    add_input(manifest, args.recoveries);
    add_input(manifest, args.observations);
    if (!args.config.empty()) {
        add_input(manifest, args.config);
    }
    manifest.config_digest = config.digest();
    manifest.timestamp = manifest_timestamp();

    fs::create_directories(args.out_dir);
    write_file(fs::path(args.out_dir) / "vintage.csv", [&](std::ostream& out) {
        csv::write_vintage(out, rows, &manifest);
    });
    write_file(fs::path(args.out_dir) / "tel.csv", [&](std::ostream& out) {
        csv::write_tel(out, trace, &manifest);
    });
    return context.finish();
}

// ------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario;
    std::string figure;
    std::string out_dir = ".";
    std::int64_t periods = 0; // 0 = per-kind default
};

int cmd_simulate(const SimulateArgs& args, Context& context) {
    if (args.scenario.empty() == args.figure.empty()) {
        throw std::invalid_argument("pass exactly one of --scenario or --figure");
    }

    ScenarioConfig scenario;
    std::string kind = "book";
    Config config;
    if (!args.figure.empty()) {
        scenario = figure_scenario(args.figure);
        if (args.figure == "fig7_1") {
            kind = "static_pool";
        } else if (args.figure == "fig7_2") {
            kind = "npl_book";
        }
    } else {
        config = load_config(args.scenario);
        scenario = scenario_from_config(config);
        kind = config.get_string("scenario.kind", "book");
        if (kind != "book" && kind != "static_pool" && kind != "npl_book") {
            throw std::invalid_argument("config key scenario.kind: '" + kind +
                                        "' is not book, static_pool or npl_book");
        }
    }

    std::size_t periods = 0;
    if (args.periods < 0) {
        throw std::invalid_argument("--periods must be non-negative");
    }
    if (args.periods > 0) {
        periods = static_cast<std::size_t>(args.periods);
    } else {
        const std::int64_t configured = config.get_int("scenario.periods", 0);
        if (configured < 0) {
            throw std::invalid_argument("config key scenario.periods must be non-negative");
        }
        periods = configured > 0 ? static_cast<std::size_t>(configured)
                                 : (kind == "npl_book" ? 36 : 24);
    }

    RunManifest manifest;
    if (!args.figure.empty()) {
        manifest.command = "simulate --figure " + args.figure;
    } else {
        manifest.command = "simulate --scenario " + args.scenario;
        add_input(manifest, args.scenario);
    }
    manifest.command += " --periods " + std::to_string(periods);
    manifest.config_digest = config.digest();
    manifest.seed = scenario.seed;
    manifest.timestamp = manifest_timestamp();

    fs::create_directories(args.out_dir);
    const fs::path out_dir(args.out_dir);

    if (kind == "book") {
        const std::vector<SimulatedLoan> book = generate_book(scenario);
        std::vector<LoanContract> contracts;
        std::vector<csv::NamedProfile> profiles;
        contracts.reserve(book.size());
        profiles.reserve(book.size());
        for (const SimulatedLoan& loan : book) {
            contracts.push_back(loan.contract);
            profiles.push_back(csv::NamedProfile{loan.contract.id, loan.profile});
        }
        write_file(out_dir / "contracts.csv", [&](std::ostream& out) {
            csv::write_contracts(out, contracts, &manifest);
        });
        write_file(out_dir / "profiles.csv", [&](std::ostream& out) {
            csv::write_profiles(out, profiles, &manifest);
        });
        const double pd = scenario.period_pd();
        if (pd > 0.0 && pd < 1.0) {
            const PortfolioSimulation simulation = simulate_portfolio(scenario, periods);
            write_file(out_dir / "snapshots.csv", [&](std::ostream& out) {
                csv::write_snapshots(out, simulation.snapshots, &manifest);
            });
        } else {
            context.warn("risk level implies no defaults; snapshots.csv not emitted");
        }
    } else if (kind == "static_pool") {
        const StaticPoolSimulation simulation = simulate_static_pool(scenario);
        csv::PoolDefinition definition;
        definition.member_ids = simulation.pool.member_ids;
        definition.default_date = simulation.pool.history.front().as_of;
        write_file(out_dir / "pool.csv", [&](std::ostream& out) {
            csv::write_pool(out, definition, &manifest);
        });
        write_file(out_dir / "recoveries.csv", [&](std::ostream& out) {
            csv::write_recoveries(out, simulation.expected_recoveries, &manifest);
        });
        write_file(out_dir / "observations.csv", [&](std::ostream& out) {
            csv::write_observations(out, simulation.pool.id, simulation.pool.history,
                                    &manifest);
        });
    } else {
        const std::vector<PoolPeriod> book = simulate_npl_book(scenario, periods);
        write_file(out_dir / "observations.csv", [&](std::ostream& out) {
            csv::write_observations(out, "book", book, &manifest);
        });
    }
    return context.finish();
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"credit-risk impairment analytics: valuation trajectories, "
                 "expected-loss dashboards, vintage analysis and simulation"};
    app.require_subcommand(1);

    ValueArgs value_args;
    Context value_context;
    CLI::App* value = app.add_subcommand(
        "value", "per-loan carrying-amount and conservatism trajectories");
    value->add_option("--contracts", value_args.contracts, "contracts CSV")->required();
    value->add_option("--profiles", value_args.profiles, "risk-profile CSV")->required();
    value->add_option("--config", value_args.config, "config file (INI)");
    value->add_option("--out", value_args.out, "output CSV path (default stdout)");
    value->add_flag("--strict", value_context.strict, "escalate warnings to exit 1");

    DashboardArgs dashboard_args;
    Context dashboard_context;
    CLI::App* dashboard = app.add_subcommand(
        "dashboard", "expected-loss consumption report for a snapshot pair");
    dashboard->add_option("--bop", dashboard_args.bop, "begin-of-period snapshot CSV")
        ->required();
    dashboard->add_option("--eop", dashboard_args.eop, "end-of-period snapshot CSV")
        ->required();
    dashboard->add_option("--config", dashboard_args.config, "config file (INI)");
    dashboard->add_option("--out", dashboard_args.out, "output path (default stdout)");
    dashboard->add_option("--format", dashboard_args.format, "table or csv");
    dashboard->add_flag("--monthly", dashboard_args.monthly,
                        "period is one month of the annual forecast");
    dashboard->add_flag("--split", dashboard_args.split,
                        "decompose the dashboard into PD/EAD/LGD effects");
    dashboard->add_flag("--strict", dashboard_context.strict,
                        "escalate warnings to exit 1");

    VintageArgs vintage_args;
    Context vintage_context;
    CLI::App* vintage = app.add_subcommand(
        "vintage", "static-pool vintage report and total-expected-loss trace");
    vintage->add_option("--pool", vintage_args.pool, "pool membership CSV")->required();
    vintage->add_option("--recoveries", vintage_args.recoveries,
                        "expected recovery schedules CSV")
        ->required();
    vintage->add_option("--observations", vintage_args.observations,
                        "per-period observations CSV")
        ->required();
    vintage->add_option("--config", vintage_args.config, "config file (INI)");
    vintage->add_option("--out-dir", vintage_args.out_dir,
                        "output directory (default .)");
    vintage->add_flag("--strict", vintage_context.strict, "escalate warnings to exit 1");

    SimulateArgs simulate_args;
    Context simulate_context;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "emit a simulated book in the tool's own CSV schemas");
    simulate->add_option("--scenario", simulate_args.scenario, "scenario config file");
    simulate->add_option("--figure", simulate_args.figure,
                         "named preset (fig4_1, fig5_1, fig7_1, fig7_2)");
    simulate->add_option("--out-dir", simulate_args.out_dir,
                         "output directory (default .)");
    simulate->add_option("--periods", simulate_args.periods,
                         "simulation length in periods");
    simulate->add_flag("--strict", simulate_context.strict,
                       "escalate warnings to exit 1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(value)) {
            return cmd_value(value_args, value_context);
        }
        if (app.got_subcommand(dashboard)) {
            return cmd_dashboard(dashboard_args, dashboard_context);
        }
        if (app.got_subcommand(vintage)) {
            return cmd_vintage(vintage_args, vintage_context);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(simulate_args, simulate_context);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace iacvlab::cli
