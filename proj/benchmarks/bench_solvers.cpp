#include <benchmark/benchmark.h>

#include "perfhom/geometry.hpp"
#include "perfhom/localref.hpp"
#include "perfhom/nonlocal.hpp"

namespace {

using namespace perfhom;

NonlocalOperator perforated_operator(double h, BoundaryCondition bc) {
    PerforationSpec spec;
    spec.omega.upper = {1.0, 1.0, 0.0};
    spec.epsilon = 0.25;
    const KernelSpec k = make_kernel(2, Profile::bump);
    const Grid g = Grid::covering(spec.omega, h, k.support_radius());
    return NonlocalOperator(build_periodic_mask(spec, g), sample(k, h), bc);
}

void BM_NonlocalSolve(benchmark::State& state) {
    const NonlocalOperator op = perforated_operator(1.0 / static_cast<double>(state.range(0)), BoundaryCondition::dirichlet_holes);
    ScalarField f(op.grid());
    for (std::size_t i : op.unknowns()) f[i] = 1.0;
    std::size_t iterations = 0;
    for (auto _ : state) {
        const SolveResult r = solve(op, f, SolveOptions{1e-10});
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.u.values().data());
    }
    state.counters["cg_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_NonlocalSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FirstEigenvalue(benchmark::State& state) {
    const NonlocalOperator op = perforated_operator(1.0 / static_cast<double>(state.range(0)), BoundaryCondition::neumann_holes);
    for (auto _ : state) {
        const SpectralResult r = first_eigenvalue(op, SpectralOptions{1e-8});
        benchmark::DoNotOptimize(r.eigenvalue);
        state.counters["applications"] = static_cast<double>(r.iterations);
    }
}
BENCHMARK(BM_FirstEigenvalue)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CellProblem(benchmark::State& state) {
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        const CellSolution c = homogenized_coefficients(CellGeometry{{1.0, 1.0}, BallHole{0.25}}, h);
        benchmark::DoNotOptimize(c.q[0][0]);
    }
}
BENCHMARK(BM_CellProblem)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
