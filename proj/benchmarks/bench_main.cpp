#include <benchmark/benchmark.h>

#include "qbm/coefficients.hpp"
#include "qbm/ermakov.hpp"
#include "qbm/fields.hpp"
#include "qbm/master_solver.hpp"
#include "qbm/reduction.hpp"
#include "qbm/symmetry.hpp"

namespace {

qbm::CoefficientSet bench_coefficients() {
    return qbm::make_coefficients(
        1.0, 1.0, qbm::Profile::constant(1.0), qbm::Profile::constant(0.2),
        qbm::Profile::constant(0.05), qbm::Profile::constant(0.02));
}

qbm::Field2D bench_field() {
    const qbm::Grid2D grid =
        qbm::make_grid2d({-6.0, 6.0, 201}, {-6.0, 6.0, 201});
    return qbm::gaussian2d(grid, {});
}

void BM_SpatialRhs(benchmark::State& state) {
    const auto cs = bench_coefficients();
    const auto f = bench_field();
    for (auto _ : state) benchmark::DoNotOptimize(qbm::spatial_rhs(f, cs, 0.0));
}
BENCHMARK(BM_SpatialRhs);

void BM_Rk4Step(benchmark::State& state) {
    const auto cs = bench_coefficients();
    const auto f = bench_field();
    const double dt = qbm::admissible_dt(f.grid, cs, 0.0, 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(qbm::step(f, cs, dt));
}
BENCHMARK(BM_Rk4Step);

void BM_Sample2d(benchmark::State& state) {
    const auto f = bench_field();
    for (auto _ : state) {
        double acc = 0.0;
        for (int k = 0; k < 1024; ++k) {
            const double x = -5.5 + 11.0 * double(k) / 1023.0;
            acc += qbm::sample2d(f, x, 0.37 * x);
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * 1024);
}
BENCHMARK(BM_Sample2d);

void BM_IntegrateEp(benchmark::State& state) {
    qbm::ErmakovProblem prob;
    prob.omega2 = qbm::Profile::constant(1.0);
    prob.K = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(qbm::integrate_ep(prob, 0.0, 1.0, 1e-3));
}
BENCHMARK(BM_IntegrateEp);

void BM_LieBracket(benchmark::State& state) {
    const auto gens = qbm::constant_generators(bench_coefficients());
    for (auto _ : state)
        benchmark::DoNotOptimize(qbm::lie_bracket(gens[2], gens[4]));
}
BENCHMARK(BM_LieBracket);

void BM_AlgebraTable(benchmark::State& state) {
    const auto gens = qbm::constant_generators(bench_coefficients());
    const qbm::TimeDomain window{0.0, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(qbm::algebra_table(gens, window));
}
BENCHMARK(BM_AlgebraTable);

void BM_StepReduced(benchmark::State& state) {
    qbm::ReducedCoefficients rc;
    rc.S = qbm::Profile::constant(0.09);
    rc.R = qbm::Profile::constant(1.0);
    rc.qt = qbm::Profile::constant(0.0);
    const qbm::Grid1D grid = qbm::make_grid1d(-8.0, 8.0, 641);
    qbm::Field1D f = qbm::make_field1d(grid, 0.0);
    for (int i = 0; i < grid.n; ++i) {
        const double w = grid.coord(i);
        f.values[size_t(i)] = std::exp(-0.5 * w * w);
    }
    const double dt = qbm::admissible_dt_1d(grid, rc, 0.0, 0.4);
    for (auto _ : state)
        benchmark::DoNotOptimize(qbm::step_reduced(f, rc, dt));
}
BENCHMARK(BM_StepReduced);

} // namespace

BENCHMARK_MAIN();
