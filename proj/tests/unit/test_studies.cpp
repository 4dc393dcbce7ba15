#include <fiber/studies.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace fiber;

namespace {

StudyOptions small_options()
{
    StudyOptions o;
    o.node_count = 20;
    o.first_index = 0;
    o.last_index = 3;
    o.reference_index = 3;
    return o;
}

} // namespace

TEST_CASE("log-log slope")
{
    const std::vector<double> tau{1.0, 0.5, 0.25, 0.125};
    std::vector<double> lin, quad;
    for (double t : tau) {
        lin.push_back(3.0 * t);
        quad.push_back(0.7 * t * t);
    }
    CHECK(loglog_slope(tau, lin) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(loglog_slope(tau, quad) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS(loglog_slope({1.0}, {1.0}));
}

TEST_CASE("options validation")
{
    StudyOptions o = small_options();
    o.reference_index = 5;
    CHECK_THROWS_AS(o.validate(), InvalidConfiguration);
    o = small_options();
    o.t_star = 3e-4;
    CHECK_THROWS_AS(o.validate(), InvalidConfiguration);
    o = small_options();
    o.first_index = 4;
    CHECK_THROWS_AS(o.validate(), InvalidConfiguration);
}

TEST_CASE("convergence study structure")
{
    const ConvergenceReport rep = run_convergence_study(CaseAForce{}, ConstraintDensity::Nodal, small_options());
    REQUIRE(rep.ok());
    REQUIRE(rep.rows.size() == 4);
    for (int i = 0; i < 4; ++i) {
        const ConvergenceRow& r = rep.row(i);
        CHECK(r.index == i);
        CHECK(r.tau == std::ldexp(1e-3, -i));
        CHECK(r.iters_avg == doctest::Approx(static_cast<double>(r.iters_total) / (1 << i)));
        CHECK(r.wall_ms == 0.0);
        CHECK(r.error_max <= r.error_nodal);
    }
    CHECK(rep.row(3).error_l2 == 0.0);
    CHECK(rep.row(3).error_nodal == 0.0);
    for (int i = 0; i < 2; ++i)
        CHECK(rep.row(i).error_l2 > rep.row(i + 1).error_l2);
    CHECK_THROWS(rep.row(9));
}

TEST_CASE("studies are deterministic across thread counts")
{
    StudyOptions one = small_options();
    one.threads = 1;
    StudyOptions four = small_options();
    four.threads = 4;
    const ConvergenceReport a = run_convergence_study(CaseBForce{}, ConstraintDensity::Nodal, one);
    const ConvergenceReport b = run_convergence_study(CaseBForce{}, ConstraintDensity::Nodal, four);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].error_l2 == b.rows[i].error_l2);
        CHECK(a.rows[i].dl == b.rows[i].dl);
        CHECK(a.rows[i].iters_total == b.rows[i].iters_total);
    }
}

TEST_CASE("elongation study")
{
    const ElongationReport rep =
        run_elongation_study(CaseAForce{}, {ConstraintDensity::Nodal, ConstraintDensity::Half}, small_options());
    REQUIRE(rep.ok());
    REQUIRE(rep.dl.size() == 2);
    REQUIRE(rep.taus.size() == 4);
    for (const auto& series : rep.dl)
        for (double dl : series)
            CHECK(dl >= -kElongationFloor);
}

TEST_CASE("failures are reported per row")
{
    StudyOptions o = small_options();
    o.config.max_iter = 1;
    const ConvergenceReport rep = run_convergence_study(CaseAForce{}, ConstraintDensity::Nodal, o);
    CHECK_FALSE(rep.ok());
    for (const auto& r : rep.rows)
        CHECK_FALSE(r.failure.empty());
}

TEST_CASE("bound scenario on a short horizon")
{
    BoundOptions o;
    o.params.end_time = 5e-4;
    o.node_count = 20;
    o.densities = {ConstraintDensity::Nodal, ConstraintDensity::Third};
    const BoundReport rep = run_bound_scenario(o);
    REQUIRE(rep.runs.size() == 2);
    for (const auto& run : rep.runs) {
        CHECK(run.failure.empty());
        CHECK(run.series.samples.size() == 5);
        for (const auto& s : run.series.samples)
            CHECK(s.bound == doctest::Approx(s.t * o.tau));
    }
    CHECK(rep.run(ConstraintDensity::Third).density == ConstraintDensity::Third);
    CHECK_THROWS(rep.run(ConstraintDensity::Half));
}

TEST_CASE("thread count from the environment")
{
    CHECK(study_threads(3) == 3);
    setenv("FIBER_THREADS", "2", 1);
    CHECK(study_threads(0) == 2);
    setenv("FIBER_THREADS", "0", 1);
    CHECK_THROWS_AS(study_threads(0), InvalidConfiguration);
    unsetenv("FIBER_THREADS");
    CHECK(study_threads(0) >= 1);
}
