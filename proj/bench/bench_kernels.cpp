// Serial-vs-parallel comparison of the three data-parallel kernels: the
// critical-vector search (table path vs the serial slow-path reference),
// the grid oracle, and the resolution sweep.

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "audit/game.hpp"
#include "audit/oracle.hpp"
#include "audit/solver.hpp"
#include "audit/sweep.hpp"

using namespace audit;

namespace {

AuditGame resolution_game(int m) {
    ContinuousModelSpec spec;
    spec.m = m;
    return discretize(spec);
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

void BM_SearchFast(benchmark::State& state) {
    const AuditGame g = resolution_game(static_cast<int>(state.range(0)));
    set_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(succinct_search(g, Objective::PrincipalUtility, 1e-6));
    }
}

void BM_SearchReference(benchmark::State& state) {
    const AuditGame g = resolution_game(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            succinct_search_reference(g, Objective::PrincipalUtility, 1e-6));
    }
}

void BM_GridParallel(benchmark::State& state) {
    const AuditGame g = heatmap_game();
    set_threads(static_cast<int>(state.range(0)));
    GridSpec grid;
    grid.step = 1.0 / 64;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            grid_best(g, Objective::PrincipalUtility, grid, GridMode::Worst));
    }
}

void BM_GridSerial(benchmark::State& state) {
    const AuditGame g = heatmap_game();
    GridSpec grid;
    grid.step = 1.0 / 64;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            grid_best_serial(g, Objective::PrincipalUtility, grid, GridMode::Worst));
    }
}

void BM_ResolutionSweep(benchmark::State& state) {
    SweepPlan plan;
    plan.kind = SweepPlan::Kind::Resolution;
    plan.cspec = ContinuousModelSpec{};
    plan.m_lo = 2;
    plan.m_hi = 48;
    plan.eps = 1e-6;
    set_threads(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep(plan));
    }
}

}  // namespace

BENCHMARK(BM_SearchFast)->Args({64, 1})->Args({64, 2})->Args({192, 1})->Args({192, 2})
    ->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SearchReference)->Arg(64)->Arg(192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolutionSweep)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
