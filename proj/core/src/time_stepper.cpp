#include <fiber/quadrature.hpp>
#include <fiber/time_stepper.hpp>

#include <chrono>
#include <cmath>
#include <sstream>

namespace fiber {

int Trajectory::total_iterations() const
{
    int total = 0;
    for (const auto& s : stats)
        total += s.iterations;
    return total;
}

int level_count(double end_time, double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw InvalidConfiguration("time step must be positive");
    if (!(end_time > 0.0))
        throw InvalidConfiguration("end time must be positive");
    const double ratio = end_time / tau;
    const double n = std::round(ratio);
    if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << "time step " << tau << " does not divide end time " << end_time;
        throw InvalidConfiguration(os.str());
    }
    return static_cast<int>(n);
}

double elongation(const CoefficientTuple& v, const Grid& grid)
{
    v.require_grid(grid, "elongation");
    const auto& rule = gauss_legendre_unit(5);
    double total = 0.0;
    for (int e = 0; e < grid.cell_count(); ++e) {
        double cell = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
            cell += rule.weights[q] * eval_fe_local(v, grid, e, rule.nodes[q], 1).norm();
        total += cell * grid.h();
    }
    return total - grid.length();
}

Trajectory run(const Scenario& scenario, const LevelObserver& observer)
{
    const ModelParams& params = scenario.params;
    params.validate();
    scenario.config.validate();
    const int levels = level_count(params.end_time, scenario.tau);
    const Grid grid(params.length, scenario.node_count);
    const AssembledForms forms = assemble_forms(grid);
    const LevelSolver solver(grid, forms, params, scenario.force, scenario.config);

    auto traj = std::make_shared<Trajectory>();
    traj->params = params;
    traj->grid = grid;
    traj->tau = scenario.tau;
    traj->density = scenario.density;
    traj->states.reserve(levels + 1);
    traj->states.push_back(initial_state(grid, params));
    traj->times.push_back(0.0);
    traj->elongations.push_back(elongation(traj->states.back(), grid));

    for (int k = 0; k < levels; ++k) {
        const CoefficientTuple& r_k = traj->states[k];
        const CoefficientTuple& r_km1 = traj->states[k == 0 ? 0 : k - 1];
        const auto start = std::chrono::steady_clock::now();
        LevelResult result;
        try {
            result = solver.solve(r_k, r_km1, scenario.tau, scenario.density);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "level " << k << " (t = " << (k + 1) * scenario.tau << "): " << e.what();
            throw LevelFailure(k, traj, os.str());
        }
        const auto stop = std::chrono::steady_clock::now();
        traj->wall_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
        traj->stats.push_back(std::move(result.stats));
        traj->states.push_back(std::move(result.r_next));
        traj->times.push_back((k + 1) * scenario.tau);
        traj->elongations.push_back(elongation(traj->states.back(), grid));
        if (observer)
            observer(k, *traj);
    }
    return std::move(*traj);
}

CoefficientTuple interpolant_at(const Trajectory& traj, double t)
{
    if (traj.states.empty())
        throw InvalidConfiguration("interpolant_at: empty trajectory");
    const double end = traj.times.back();
    if (!(t >= 0.0 && t <= end * (1.0 + 1e-12))) {
        std::ostringstream os;
        os << "time " << t << " outside [0, " << end << "]";
        throw InvalidConfiguration(os.str());
    }
    const int n = static_cast<int>(traj.states.size()) - 1;
    if (n == 0 || t <= 0.0)
        return traj.states.front();
    int k = static_cast<int>(std::ceil(t / traj.tau - 1e-9));
    k = std::clamp(k, 1, n);
    const double w = (t - traj.times[k - 1]) / traj.tau;
    if (w >= 1.0)
        return traj.states[k];
    return w * (traj.states[k] - traj.states[k - 1]) + traj.states[k - 1];
}

MonotonicityReport monotonicity_check(const CoefficientTuple& r_k, const CoefficientTuple& r_next,
                                      const ConstraintSet& cs, double tolerance)
{
    r_k.require_shape(r_next, "monotonicity_check");
    MonotonicityReport out;
    const Grid& grid = cs.grid();
    for (int j = 0; j < cs.rows(); ++j) {
        const auto& p = cs.points()[j];
        const Vector t = eval_fe_local(r_k, grid, p.cell, p.t, 1);
        const Vector u = eval_fe_local(r_next, grid, p.cell, p.t, 1);
        out.max_orthogonality = std::max(out.max_orthogonality, std::abs((u - t).dot(t)));
        out.max_norm_decrease = std::max(out.max_norm_decrease, t.norm() - u.norm());
    }
    out.passed = out.max_orthogonality <= tolerance && out.max_norm_decrease <= tolerance;
    return out;
}

BoundSeries check_elongation_bound(const Trajectory& traj)
{
    BoundSeries out;
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const double t = traj.times[k];
        const double bound = t * traj.tau * traj.params.length;
        const double dl = traj.elongations[k];
        const bool ok = dl <= bound + kElongationFloor;
        out.samples.push_back({t, dl, bound, ok});
        if (!ok && out.satisfied) {
            out.satisfied = false;
            out.first_violation = static_cast<int>(k);
        }
    }
    return out;
}

} // namespace fiber
