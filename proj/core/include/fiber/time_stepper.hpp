#pragma once
//
// Rothe outer loop. Level k solves for r_{k+1} from (r_k, r_{k-1});
// the step before the first is taken as r_{-1} = r_0 (fiber at rest), so
// N = T / tau levels are solved and states[k] is the fiber at t_k = k tau.
//

#include <fiber/optimizer.hpp>

#include <functional>
#include <memory>
#include <vector>

namespace fiber {

struct Scenario {
    ForceField force = ZeroForce{};
    ModelParams params;
    double tau = 1e-3;
    int node_count = 300;
    ConstraintDensity density = ConstraintDensity::Nodal;
    OptimizerConfig config;
};

struct Trajectory {
    ModelParams params;
    Grid grid{1.0, 3};
    double tau = 0.0;
    ConstraintDensity density = ConstraintDensity::Nodal;
    std::vector<double> times;            // t_0..t_N
    std::vector<CoefficientTuple> states; // r_0..r_N
    std::vector<double> elongations;      // per state
    std::vector<SolveStats> stats;        // per solved level (N entries)
    std::vector<double> wall_ms;          // per solved level

    int levels() const { return static_cast<int>(stats.size()); }
    int total_iterations() const;
};

// Raised when a level fails; carries the levels completed so far.
class LevelFailure : public Error {
public:
    LevelFailure(int level, std::shared_ptr<const Trajectory> partial, const std::string& what)
        : Error(what), level_(level), partial_(std::move(partial)) {}
    int level() const { return level_; }
    const Trajectory& partial() const { return *partial_; }

private:
    int level_;
    std::shared_ptr<const Trajectory> partial_;
};

// Number of levels T / tau; rejects a tau that does not divide T.
int level_count(double end_time, double tau);

using LevelObserver = std::function<void(int level, const Trajectory&)>;

Trajectory run(const Scenario& scenario, const LevelObserver& observer = {});

CoefficientTuple interpolant_at(const Trajectory& traj, double t);

// Composite 5-point Gauss-Legendre of |d/ds v_h| minus l.
double elongation(const CoefficientTuple& v, const Grid& grid);

struct MonotonicityReport {
    double max_orthogonality = 0.0; // max |(d/ds r_next - t_j) . t_j|
    double max_norm_decrease = 0.0; // max (|t_j| - |d/ds r_next(sigma_j)|)
    bool passed = true;
};

MonotonicityReport monotonicity_check(const CoefficientTuple& r_k, const CoefficientTuple& r_next,
                                      const ConstraintSet& cs, double tolerance = 1e-9);

// Rounding floor for comparing elongations against zero.
inline constexpr double kElongationFloor = 1e-12;

struct BoundSample {
    double t;
    double dl;
    double bound; // t tau l
    bool satisfied;
};

struct BoundSeries {
    std::vector<BoundSample> samples;
    bool satisfied = true;
    int first_violation = -1;
};

BoundSeries check_elongation_bound(const Trajectory& traj);

} // namespace fiber
