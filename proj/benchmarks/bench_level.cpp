#include <fiber/optimizer.hpp>

#include <benchmark/benchmark.h>

using namespace fiber;

namespace {

void assemble(benchmark::State& state)
{
    const Grid g(1.0, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(assemble_forms(g));
}

// First level of case A from rest.
void first_level(benchmark::State& state)
{
    const Grid g(1.0, 300);
    const AssembledForms f = assemble_forms(g);
    ModelParams p;
    const CoefficientTuple r0 = initial_state(g, p);
    const double tau = 1e-3 / static_cast<double>(state.range(0));
    const LevelSolver solver(g, f, p, CaseAForce{}, OptimizerConfig{});
    long iterations = 0;
    for (auto _ : state) {
        const LevelResult lr = solver.solve(r0, r0, tau, ConstraintDensity::Nodal);
        iterations = lr.stats.iterations;
        benchmark::DoNotOptimize(lr.r_next.coeffs().data());
    }
    state.counters["iterations"] = static_cast<double>(iterations);
}

} // namespace

BENCHMARK(assemble)->Arg(300)->Arg(3000);
BENCHMARK(first_level)->Arg(1)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);
