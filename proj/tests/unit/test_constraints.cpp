#include "../support/oracles.hpp"

#include <fiber/constraints.hpp>
#include <fiber/model.hpp>

#include <doctest.h>

#include <random>

using namespace fiber;

TEST_CASE("density names and point counts")
{
    for (auto d : {ConstraintDensity::Nodal, ConstraintDensity::Half, ConstraintDensity::Third})
        CHECK(parse_density(to_string(d)) == d);
    CHECK_THROWS_AS(parse_density("quarter"), InvalidConfiguration);
    const Grid g(1.0, 7);
    CHECK(constraint_points(g, ConstraintDensity::Nodal).size() == 6);
    CHECK(constraint_points(g, ConstraintDensity::Half).size() == 12);
    CHECK(constraint_points(g, ConstraintDensity::Third).size() == 18);
    const auto third = constraint_points(g, ConstraintDensity::Third);
    const auto ref = oracle::constraint_positions(g, ConstraintDensity::Third);
    for (std::size_t j = 0; j < ref.size(); ++j) {
        CHECK(third[j].sigma == doctest::Approx(ref[j]).epsilon(1e-15));
        CHECK(third[j].sigma == doctest::Approx(j * g.h() / 3.0).epsilon(1e-14));
    }
}

TEST_CASE("nodal rows on a three-node grid")
{
    const Grid g(1.0, 3);
    ModelParams p;
    const CoefficientTuple r0 = initial_state(g, p);
    const ConstraintSet cs = build_constraints(r0, g, ConstraintDensity::Nodal);
    CHECK(cs.rows() == 2);
    const oracle::Dense c(cs.matrix());
    for (int j = 0; j < 2; ++j) {
        const int base = (3 + j) * 2;
        CHECK(c.row(j).segment(base, 2).transpose().isApprox(r0.slope(j).transpose()));
        CHECK(c.row(j).cwiseAbs().sum() == doctest::Approx(r0.slope(j).cwiseAbs().sum()));
    }
    // Stored entries: the two slope components of one node per row.
    for (int j = 0; j < 2; ++j) {
        int stored = 0;
        for (int k = 0; k < cs.matrix().outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(cs.matrix(), k); it; ++it)
                stored += it.row() == j;
        CHECK(stored == 2);
    }
    CHECK(cs.rhs()(0) == doctest::Approx(1.0));
}

TEST_CASE("constraint matrix matches the dense oracle")
{
    std::mt19937 rng(31);
    for (auto d : {ConstraintDensity::Nodal, ConstraintDensity::Half, ConstraintDensity::Third})
        for (int n : {2, 3}) {
            const Grid g(1.0, 6);
            const CoefficientTuple r = oracle::random_state(g, n, rng);
            const ConstraintSet cs = build_constraints(r, g, d);
            const oracle::Dense ref = oracle::constraint_matrix(r, g, oracle::constraint_positions(g, d));
            CHECK((oracle::Dense(cs.matrix()) - ref).cwiseAbs().maxCoeff() < 1e-12);
            CHECK(residual(r, cs).cwiseAbs().maxCoeff() < 1e-12);
            // Row locality: one cell, so at most two nodes.
            for (int j = 0; j < cs.rows(); ++j) {
                std::vector<int> nodes;
                for (Eigen::Index k = 0; k < ref.cols(); ++k)
                    if (ref(j, k) != 0.0)
                        nodes.push_back(static_cast<int>(k / n) % g.node_count());
                std::sort(nodes.begin(), nodes.end());
                nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
                CHECK(nodes.size() <= 2);
            }
        }
}

TEST_CASE("half density midpoint slopes on the straight state")
{
    const Grid g(1.0, 9);
    ModelParams p;
    const CoefficientTuple r0 = initial_state(g, p);
    const ConstraintSet cs = build_constraints(r0, g, ConstraintDensity::Half);
    for (int j = 1; j < cs.rows(); j += 2)
        CHECK((cs.tangents()[j] + p.gravity()).norm() < 1e-13);
}

TEST_CASE("residual semantics")
{
    std::mt19937 rng(9);
    const Grid g(1.0, 4);
    const CoefficientTuple r = oracle::random_state(g, 2, rng);
    const ConstraintSet cs = build_constraints(r, g, ConstraintDensity::Half);
    CoefficientTuple shifted = r;
    Vector shift(2);
    shift << 0.4, -0.2;
    for (int j = 0; j < 4; ++j)
        shifted.value(j) += shift;
    CHECK(residual(shifted, cs).cwiseAbs().maxCoeff() < 1e-12);

    const CoefficientTuple v = oracle::random_tuple(4, 2, rng);
    const Vector res = residual(v, cs);
    for (int j = 0; j < cs.rows(); ++j) {
        const double s = cs.points()[j].sigma;
        const Vector t = eval_fe(r, g, s, 1);
        CHECK(res(j) == doctest::Approx((eval_fe(v, g, s, 1) - t).dot(t)).epsilon(1e-12));
    }
    // Affine in v.
    const CoefficientTuple w = oracle::random_tuple(4, 2, rng);
    const Vector mix = residual(0.3 * v + 0.7 * w, cs);
    CHECK((mix - (0.3 * residual(v, cs) + 0.7 * residual(w, cs))).norm() < 1e-12);
}

TEST_CASE("free/fixed split")
{
    std::mt19937 rng(10);
    const Grid g(1.0, 5);
    const CoefficientTuple r = oracle::random_state(g, 2, rng);
    const ConstraintSet cs = build_constraints(r, g, ConstraintDensity::Third);
    CHECK(cs.free().size() + cs.fixed().size() == static_cast<std::size_t>(r.size()));
    const CoefficientTuple y = oracle::random_tuple(5, 2, rng);
    const Vector lhs = cs.free_matrix() * cs.gather_free(y.coeffs());
    CHECK((lhs - cs.free_rhs(y) - residual(y, cs)).norm() < 1e-12);
    Vector back = Vector::Zero(y.size());
    cs.scatter_free(cs.gather_free(y.coeffs()), back);
    for (int k : cs.free())
        CHECK(back(k) == y.coeffs()(k));
}

TEST_CASE("nesting of densities")
{
    std::mt19937 rng(12);
    const Grid g(1.0, 6);
    const CoefficientTuple r = oracle::random_state(g, 2, rng);
    const ConstraintSet third = build_constraints(r, g, ConstraintDensity::Third);
    const ConstraintSet nodal = build_constraints(r, g, ConstraintDensity::Nodal);
    for (int j = 0; j < nodal.rows(); ++j) {
        const oracle::Dense a = oracle::Dense(nodal.matrix()).row(j);
        const oracle::Dense b = oracle::Dense(third.matrix()).row(3 * j);
        CHECK((a - b).norm() < 1e-14);
    }
}

TEST_CASE("degenerate and oversized constraint sets")
{
    const Grid g(1.0, 5);
    CoefficientTuple flat(5, 2);
    CHECK_THROWS_AS(build_constraints(flat, g, ConstraintDensity::Nodal), DegenerateConstraint);
    try {
        build_constraints(flat, g, ConstraintDensity::Nodal);
    } catch (const DegenerateConstraint& e) {
        CHECK(e.point() == 0);
        CHECK(e.position() == 0.0);
    }
    // 3(M-1) rows exceed 2(M-1) free coefficients in one dimension.
    const CoefficientTuple line = interpolate_scalar([](double s) { return s; },
                                                     std::function<double(double)>([](double) { return 1.0; }),
                                                     Vector::Ones(1), g);
    CHECK_THROWS_AS(build_constraints(line, g, ConstraintDensity::Third), InvalidConfiguration);
}

TEST_CASE("tau inequality diagnostic")
{
    const Grid g(1.0, 6);
    ModelParams p;
    const CoefficientTuple r0 = initial_state(g, p);
    const ConstraintSet cs = build_constraints(r0, g, ConstraintDensity::Nodal);
    const TauCheck same = check_tau_inequality(r0, cs, 1e-3, 60);
    CHECK(same.max_deviation == 0.0);
    CHECK(same.satisfied);
    CoefficientTuple bumped = r0;
    bumped.slope(2)(1) += 2e-6;
    const TauCheck off = check_tau_inequality(bumped, cs, 1e-3, 61);
    CHECK(off.max_deviation == doctest::Approx(2e-6));
    CHECK_FALSE(off.satisfied);
    CHECK_THROWS_AS(check_tau_inequality(r0, cs, 1e-3, 2), InvalidConfiguration);
}
