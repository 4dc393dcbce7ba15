#include <fiber/projection.hpp>

#include <benchmark/benchmark.h>

#include <cmath>

using namespace fiber;

namespace {

// Bent fiber with unit-speed tangent (cos a(s), sin a(s)) parametrization.
CoefficientTuple bent_state(const Grid& g)
{
    CoefficientTuple r(g.node_count(), 2);
    for (int j = 0; j < g.node_count(); ++j) {
        const double s = g.node(j);
        const double a = 0.4 * std::sin(3.0 * s);
        r.slope(j) << std::cos(a), std::sin(a);
        r.value(j) << s - 1.0, 0.1 * std::sin(2.0 * s);
    }
    return r;
}

void projector_factorize(benchmark::State& state, Metric metric, ConstraintDensity density)
{
    const Grid g(1.0, static_cast<int>(state.range(0)));
    const AssembledForms f = assemble_forms(g);
    const ConstraintSet cs = build_constraints(bent_state(g), g, density);
    for (auto _ : state) {
        Projector p(cs, metric, f, RankPolicy::DropDependent);
        benchmark::DoNotOptimize(&p);
    }
}

void projector_apply(benchmark::State& state, Metric metric, ConstraintDensity density)
{
    const Grid g(1.0, static_cast<int>(state.range(0)));
    const AssembledForms f = assemble_forms(g);
    const CoefficientTuple r = bent_state(g);
    const ConstraintSet cs = build_constraints(r, g, density);
    const Projector p(cs, metric, f, RankPolicy::DropDependent);
    CoefficientTuple y = r;
    y.coeffs().array() += 0.01;
    for (auto _ : state)
        benchmark::DoNotOptimize(p.project(y));
}

} // namespace

BENCHMARK_CAPTURE(projector_factorize, l2_nodal, Metric::L2, ConstraintDensity::Nodal)->Arg(100)->Arg(300)->Arg(1000);
BENCHMARK_CAPTURE(projector_factorize, euclidean_third, Metric::Euclidean, ConstraintDensity::Third)->Arg(100)->Arg(300);
BENCHMARK_CAPTURE(projector_apply, l2_nodal, Metric::L2, ConstraintDensity::Nodal)->Arg(100)->Arg(300)->Arg(1000);
BENCHMARK_CAPTURE(projector_apply, l2_third, Metric::L2, ConstraintDensity::Third)->Arg(300);
BENCHMARK_CAPTURE(projector_apply, euclidean_nodal, Metric::Euclidean, ConstraintDensity::Nodal)->Arg(300);
