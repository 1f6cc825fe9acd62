// History kernel and forward-solve timings, serial reference vs OpenMP.
//
//   ./mimfrac_bench --benchmark_filter=History
//   OMP_NUM_THREADS=4 ./mimfrac_bench

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mimfrac/fd_solver.hpp"
#include "mimfrac/inversion.hpp"
#include "mimfrac/kernels.hpp"

namespace {

using namespace mimfrac;

const ModelParams kExample{5.0, 2.0, 2.0, 0.5, 1.5, 0.05, 0.1, 0.8, 0.25};

struct HistoryFixture {
    std::size_t rows;
    std::size_t k;
    std::vector<double> levels;
    std::vector<double> wm, wi, rhs;

    HistoryFixture(std::size_t m, std::size_t steps)
        : rows(2 * (m - 1)), k(steps), levels(rows * (steps + 1)), wm(l1_lag_weights(0.8, steps + 1)),
          wi(l1_lag_weights(0.25, steps + 1)), rhs(rows) {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> d(0.0, 1.0);
        for (auto& v : levels) v = d(rng);
    }
    [[nodiscard]] kernels::HistoryView view() const { return {levels, rows, rows / 2}; }
};

void BM_HistoryReference(benchmark::State& state) {
    HistoryFixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        kernels::history_rhs_reference(f.view(), f.k, f.wm, f.wi, f.rhs);
        benchmark::DoNotOptimize(f.rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.rows * f.k));
}

void BM_HistoryParallel(benchmark::State& state) {
    HistoryFixture f(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        kernels::history_rhs(f.view(), f.k, f.wm, f.wi, f.rhs, 0);
        benchmark::DoNotOptimize(f.rhs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.rows * f.k));
}

void history_args(benchmark::internal::Benchmark* b) {
    for (int m : {80, 320})
        for (int k : {400, 1600}) b->Args({m, k});
}

BENCHMARK(BM_HistoryReference)->Apply(history_args);
BENCHMARK(BM_HistoryParallel)->Apply(history_args);

void BM_SolveForward(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const GridSpec g(m, 5 * m, 100.0);
    const SolveOptions opts{1.0, state.range(1) != 0};
    for (auto _ : state) benchmark::DoNotOptimize(solve_forward(kExample, g, opts));
    state.SetLabel(opts.parallel_history ? "openmp" : "serial");
}

BENCHMARK(BM_SolveForward)->Args({80, 0})->Args({80, 1})->Args({160, 0})->Args({160, 1})->Unit(benchmark::kMillisecond);

void BM_Jacobian(benchmark::State& state) {
    const GridSpec g(80, 400, 100.0);
    for (auto _ : state) benchmark::DoNotOptimize(sensitivity_jacobian({0.8, 0.25}, kExample, g, 0.5, 1e-3));
}

BENCHMARK(BM_Jacobian)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
