#include "../support/oracles.hpp"

#include <fiber/optimizer.hpp>

#include <doctest.h>

#include <random>

using namespace fiber;

namespace {

struct Level {
    Grid grid;
    AssembledForms forms;
    ModelParams params;
    CoefficientTuple r0;

    explicit Level(int m) : grid(1.0, m), forms(assemble_forms(grid)), r0(initial_state(grid, params)) {}
};

} // namespace

TEST_CASE("config validation and names")
{
    OptimizerConfig c;
    CHECK_NOTHROW(c.validate());
    c.beta = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
    c = OptimizerConfig{};
    c.tol_a = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
    c = OptimizerConfig{};
    c.sigma_min = 2.0;
    CHECK_THROWS_AS(c.validate(), InvalidConfiguration);
    CHECK(parse_start_guess(to_string(StartGuess::Previous)) == StartGuess::Previous);
    CHECK(parse_start_guess("extrapolated") == StartGuess::Extrapolated);
    CHECK_THROWS_AS(parse_start_guess("zero"), InvalidConfiguration);
    const OptimizerConfig e = OptimizerConfig::euclidean();
    CHECK(e.projection == Metric::Euclidean);
    CHECK(e.gradient_metric == Metric::Euclidean);
    CHECK(e.stationarity_norm == Metric::H2);
}

TEST_CASE("stationarity at rest is zero")
{
    Level lv(10);
    const QuadraticCost cost = assemble_cost(lv.r0, lv.r0, ZeroForce{}, lv.params, 1e-3, lv.forms, lv.grid);
    const ConstraintSet cs = build_constraints(lv.r0, lv.grid, ConstraintDensity::Nodal);
    CHECK(stationarity(lv.r0, cost, cs, lv.forms, OptimizerConfig{}) < 1e-14);
    CHECK(stationarity(lv.r0, cost, cs, lv.forms, OptimizerConfig::euclidean()) < 1e-14);
}

TEST_CASE("stationarity composes gradient, projection and norm")
{
    std::mt19937 rng(51);
    Level lv(4);
    const CoefficientTuple rk = oracle::random_state(lv.grid, 2, rng);
    const QuadraticCost cost = assemble_cost(rk, rk, CaseAForce{}, lv.params, 1e-3, lv.forms, lv.grid);
    const ConstraintSet cs = build_constraints(rk, lv.grid, ConstraintDensity::Half);
    const OptimizerConfig cfg = OptimizerConfig::euclidean();
    const CoefficientTuple step = rk - grad_cost(cost, rk);
    const Vector proj = oracle::dense_euclidean_projection(step.coeffs(), oracle::Dense(cs.matrix()), cs.rhs(), 4, 2);
    const CoefficientTuple p(4, 2, rk.coeffs() - proj);
    CHECK(stationarity(rk, cost, cs, lv.forms, cfg) == doctest::Approx(h2_norm(p, lv.forms)).epsilon(1e-10));
}

TEST_CASE("armijo step on a one-coefficient quadratic")
{
    // With no active rows on the moved coefficient the step is plain gradient descent.
    Level lv(3);
    ModelParams p = lv.params;
    const QuadraticCost cost = assemble_cost(lv.r0, lv.r0, CaseBForce{}, p, 1e-1, lv.forms, lv.grid);
    const ConstraintSet cs = build_constraints(lv.r0, lv.grid, ConstraintDensity::Nodal);
    const OptimizerConfig cfg = OptimizerConfig::euclidean();
    const double j0 = eval_cost(cost, lv.r0);
    const ArmijoResult step = armijo_step(lv.r0, cost, cs, lv.forms, cfg);
    CHECK(step.cost < j0);
    CHECK(step.decrease < 0.0);
    CHECK(eval_cost(cost, step.v) == doctest::Approx(step.cost).epsilon(1e-12));
    CHECK(step.sigma <= cfg.sigma0);
    CHECK(residual(step.v, cs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("armijo failure is reported")
{
    Level lv(5);
    const QuadraticCost cost = assemble_cost(lv.r0, lv.r0, CaseAForce{}, lv.params, 1e-3, lv.forms, lv.grid);
    const ConstraintSet cs = build_constraints(lv.r0, lv.grid, ConstraintDensity::Nodal);
    OptimizerConfig cfg = OptimizerConfig::euclidean();
    cfg.sigma0 = 1e3;
    cfg.sigma_min = 1e2;
    CHECK_THROWS_AS(armijo_step(lv.r0, cost, cs, lv.forms, cfg), ArmijoFailure);
}

TEST_CASE("level solve with zero force stays at rest")
{
    Level lv(20);
    const LevelResult res = solve_time_level(lv.r0, lv.r0, ZeroForce{}, lv.params, 1e-3, ConstraintDensity::Nodal,
                                             lv.forms, lv.grid, OptimizerConfig{});
    CHECK(res.stats.iterations == 0);
    CHECK(res.r_next == lv.r0);
}

TEST_CASE("level solve reaches the exact constrained minimizer")
{
    Level lv(6);
    OptimizerConfig cfg;
    cfg.tol_a = 1e-10;
    cfg.tol_r = 1e-10;
    cfg.max_iter = 100000;
    const double tau = 1e-2;
    const LevelResult res = solve_time_level(lv.r0, lv.r0, CaseAForce{}, lv.params, tau, ConstraintDensity::Half,
                                             lv.forms, lv.grid, cfg);
    const QuadraticCost cost = assemble_cost(lv.r0, lv.r0, CaseAForce{}, lv.params, tau, lv.forms, lv.grid);
    const ConstraintSet cs = build_constraints(lv.r0, lv.grid, ConstraintDensity::Half);
    // Dense KKT of min v^T A v + b^T v s.t. C v = g, clamped entries of r_0.
    const oracle::Dense a = oracle::kron_identity(oracle::Dense(cost.a), 2);
    const auto fr = free_indices(6, 2);
    const int nf = static_cast<int>(fr.size());
    const int d = cs.rows();
    oracle::Dense k = oracle::Dense::Zero(nf + d, nf + d);
    Vector rhs = Vector::Zero(nf + d);
    Vector fixed = lv.r0.coeffs();
    for (int i : fr)
        fixed(i) = 0.0;
    const oracle::Dense c(cs.matrix());
    const Vector afix = a * fixed;
    for (int i = 0; i < nf; ++i) {
        for (int j = 0; j < nf; ++j)
            k(i, j) = 2 * a(fr[i], fr[j]);
        for (int r = 0; r < d; ++r)
            k(i, nf + r) = k(nf + r, i) = c(r, fr[i]);
        rhs(i) = -cost.b(fr[i]) - 2 * afix(fr[i]);
    }
    const Vector cfix = c * fixed;
    for (int r = 0; r < d; ++r)
        rhs(nf + r) = cs.rhs()(r) - cfix(r);
    const Vector sol = k.fullPivLu().solve(rhs);
    Vector exact = fixed;
    for (int i = 0; i < nf; ++i)
        exact(fr[i]) = sol(i);
    CHECK((res.r_next.coeffs() - exact).norm() < 1e-6 * exact.norm());
    CHECK(residual(res.r_next, cs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("case A first level: strict descent and iteration order")
{
    Level lv(4);
    OptimizerConfig cfg;
    const LevelResult small = solve_time_level(lv.r0, lv.r0, CaseAForce{}, lv.params, 1e-3, ConstraintDensity::Nodal,
                                               lv.forms, lv.grid, cfg);
    const auto& h = small.stats.cost_history;
    REQUIRE(h.size() == static_cast<std::size_t>(small.stats.iterations) + 1);
    for (std::size_t i = 1; i < h.size(); ++i)
        CHECK(h[i] < h[i - 1]);
    for (double d : small.stats.decreases)
        CHECK(d < 0.0);
}

TEST_CASE("case A first level at M = 300 needs on the order of a thousand iterations")
{
    Level lv(300);
    const LevelResult res = solve_time_level(lv.r0, lv.r0, CaseAForce{}, lv.params, 1e-3, ConstraintDensity::Nodal,
                                             lv.forms, lv.grid, OptimizerConfig{});
    CHECK(res.stats.iterations >= 500);
    CHECK(res.stats.iterations <= 5000);
    const ConstraintSet cs = build_constraints(lv.r0, lv.grid, ConstraintDensity::Nodal);
    CHECK(residual(res.r_next, cs).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("iteration cap raises with the best iterate")
{
    Level lv(30);
    OptimizerConfig cfg;
    cfg.max_iter = 3;
    try {
        solve_time_level(lv.r0, lv.r0, CaseAForce{}, lv.params, 1e-3, ConstraintDensity::Nodal, lv.forms, lv.grid,
                         cfg);
        FAIL("expected MaxIterationsExceeded");
    } catch (const MaxIterationsExceeded& e) {
        CHECK(e.stats().iterations == 3);
        CHECK(e.best().same_shape(lv.r0));
    }
}

TEST_CASE("gradient map is the Riesz representative")
{
    std::mt19937 rng(52);
    Level lv(5);
    const CoefficientTuple rk = oracle::random_state(lv.grid, 2, rng);
    const QuadraticCost cost = assemble_cost(rk, rk, CaseBForce{}, lv.params, 1e-3, lv.forms, lv.grid);
    const GradientMap map(lv.forms, Metric::L2, 2);
    const CoefficientTuple z = map(cost, rk);
    const CoefficientTuple g = grad_cost(cost, rk);
    // (z, w)_L2 = g . w for every w vanishing at the clamped end.
    for (int t = 0; t < 5; ++t) {
        CoefficientTuple w = oracle::random_tuple(5, 2, rng);
        for (int k = 0; k < w.size(); ++k)
            if (is_dirichlet_index(k, 5, 2))
                w.coeffs()(k) = 0.0;
        const double lhs = z.coeffs().dot(apply_form(lv.forms.mass, w.coeffs(), 2));
        CHECK(lhs == doctest::Approx(g.coeffs().dot(w.coeffs())).epsilon(1e-10));
    }
}
