// Microbenchmarks for the hot paths: rate solving, trajectory
// construction, dashboard aggregation and the simulation kernels.

#include "iacvlab/cashflow.hpp"
#include "iacvlab/dashboards.hpp"
#include "iacvlab/simulator.hpp"
#include "iacvlab/valuation.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace {

using namespace iacvlab;

LoanContract annuity_contract(std::size_t term, double rate) {
    LoanContract contract;
    contract.id = "bench";
    contract.principal = 100.0;
    const double q = 1.0 - std::pow(1.0 + rate, -static_cast<double>(term));
    contract.cash_flows.assign(term, contract.principal * rate / q);
    return contract;
}

void bm_solve_effective_rate(benchmark::State& state) {
    const auto contract = annuity_contract(static_cast<std::size_t>(state.range(0)), 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_effective_rate(contract));
    }
}
BENCHMARK(bm_solve_effective_rate)->Arg(5)->Arg(30)->Arg(120);

void bm_present_value(benchmark::State& state) {
    const auto contract = annuity_contract(static_cast<std::size_t>(state.range(0)), 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(present_value(contract.cash_flows, 0.043));
    }
}
BENCHMARK(bm_present_value)->Arg(30)->Arg(360);

void bm_build_trajectory(benchmark::State& state) {
    const auto contract = annuity_contract(static_cast<std::size_t>(state.range(0)), 0.05);
    const auto gca = gca_trajectory(contract, 0.05);
    std::vector<double> shape(contract.term(), 1.0);
    const RiskProfile profile = normalize_profile(shape, 0.01, gca, 0.04);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_trajectory(contract, profile));
    }
}
BENCHMARK(bm_build_trajectory)->Arg(5)->Arg(30)->Arg(120);

void bm_gap_identity(benchmark::State& state) {
    const auto contract = annuity_contract(static_cast<std::size_t>(state.range(0)), 0.05);
    const auto gca = gca_trajectory(contract, 0.05);
    std::vector<double> shape(contract.term(), 1.0);
    const RiskProfile profile = normalize_profile(shape, 0.01, gca, 0.04);
    const auto hz = hazard_rates(profile.expected_losses, gca);
    const auto w = loss_weights(gca, 0.04);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gca_iacv_gap(0.01, hz, w, contract.term()));
    }
}
BENCHMARK(bm_gap_identity)->Arg(30)->Arg(360);

void bm_pl_dashboard(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.n_exposures = static_cast<std::size_t>(state.range(0));
    cfg.pd_period = 0.02;
    const auto sim = simulate_portfolio(cfg, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pl_dashboard(sim.snapshots[0], sim.snapshots[1]));
    }
}
BENCHMARK(bm_pl_dashboard)->Arg(1000)->Arg(10000);

void bm_loss_series(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.n_exposures = static_cast<std::size_t>(state.range(0));
    cfg.pd_period = 0.02;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_loss_series(cfg, 12));
    }
}
BENCHMARK(bm_loss_series)->Arg(250)->Arg(2000);

void bm_null_test(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.n_exposures = 250;
    cfg.pd_period = 0.03;
    cfg.ead_half_width = 0.5;
    const auto sim = simulate_loss_series(cfg, 60);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            binomial_null_test(sim.losses, 250, 0.03, sim.severities, 0.05));
    }
}
BENCHMARK(bm_null_test);

} // namespace

BENCHMARK_MAIN();
