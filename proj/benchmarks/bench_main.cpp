#include "markup/functionals.hpp"
#include "markup/guarantees.hpp"
#include "markup/quadrature.hpp"
#include "markup/screening.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace markup;

namespace {

ValueDistribution dip() {
    return ValueDistribution::mixture({ValueDistribution::uniform(0.0, 1.0), ValueDistribution::uniform(1.0, 3.0)},
                                      {0.5, 0.5});
}

void BM_SurplusQuadrature(benchmark::State& state) {
    const auto F = ValueDistribution::truncated_pareto(2.5, 1e4);
    const IsoElasticCost cost(2.0);
    FunctionalOptions opts;
    opts.method = SurplusMethod::quadrature;
    for (auto _ : state) {
        benchmark::DoNotOptimize(efficient_surplus(F, cost, opts).value);
    }
}
BENCHMARK(BM_SurplusQuadrature);

void BM_Ironing(benchmark::State& state) {
    const auto F = dip();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto curve = iron(F, n);
        benchmark::DoNotOptimize(curve.phi_bar(1.0));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Ironing)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_FullReportBayes(benchmark::State& state) {
    const auto F = dip();
    const IsoElasticCost cost(2.0);
    for (auto _ : state) {
        const auto M = bayes_optimal_mechanism(F, cost);
        benchmark::DoNotOptimize(full_report(F, M, cost).pi_ratio);
    }
}
BENCHMARK(BM_FullReportBayes)->Unit(benchmark::kMillisecond);

void BM_OracleExhaustive(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto P = ValueDistribution::pareto(3.0);
    std::vector<double> v;
    std::vector<double> f(n, 1.0 / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back(P.quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n)));
    }
    std::vector<double> grid;
    for (int j = 0; j < 18; ++j) {
        grid.push_back(1.05 * v.back() * j / 17.0);
    }
    const IsoElasticCost cost(2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(discrete_oracle({v, f, cost, grid}, OracleMode::exhaustive).profit);
    }
}
BENCHMARK(BM_OracleExhaustive)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_HolderBattery(benchmark::State& state) {
    const auto battery = random_mixture_battery(20, 1);
    for (auto _ : state) {
        std::size_t fails = 0;
        for (const auto& F : battery) {
            fails += holder_audit(F, 2.0).pass ? 0 : 1;
        }
        benchmark::DoNotOptimize(fails);
    }
}
BENCHMARK(BM_HolderBattery)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
