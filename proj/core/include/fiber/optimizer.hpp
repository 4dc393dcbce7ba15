#pragma once
//
// Projected gradient method with projected Armijo step sizes:
//   v <- P(v - sigma grad J(v)),  sigma = sigma0 beta^m,
// stopped when |v - P(v - grad J(v))| <= tol_a + tol_r |p(r_k)|.
//

#include <fiber/model.hpp>
#include <fiber/projection.hpp>

#include <memory>
#include <string>
#include <vector>

namespace fiber {

// Initial iterate of a level solve: r_k itself, or the projection of the
// linear extrapolation 2 r_k - r_{k-1} onto the level's constraint set.
enum class StartGuess { Previous, Extrapolated };

std::string to_string(StartGuess s);
StartGuess parse_start_guess(const std::string& text);

struct OptimizerConfig {
    double tol_a = 1e-3;
    double tol_r = 1e-2;
    int max_iter = 10000;
    double sigma0 = 1.0;
    double beta = 0.5;
    double armijo_c = 1e-4;
    double sigma_min = 1e-16;
    Metric projection = Metric::L2;
    Metric gradient_metric = Metric::L2;
    Metric stationarity_norm = Metric::L2;
    RankPolicy rank_policy = RankPolicy::DropDependent;
    double rank_tolerance = 1e-9;
    StartGuess start = StartGuess::Extrapolated;

    void validate() const;

    // The coefficient-space variant: Euclidean gradient and projection, H2 stationarity.
    static OptimizerConfig euclidean();
};

struct SolveStats {
    int iterations = 0;
    int backtracks = 0;
    double initial_stationarity = 0.0;
    double final_stationarity = 0.0;
    std::vector<double> cost_history; // J(r^(0)), then J(r^(0)) plus the accumulated decreases
    std::vector<double> decreases;    // J(r^(i+1)) - J(r^(i)), each < 0
    std::vector<double> step_sizes;
    int dropped_rows = 0;
};

class MaxIterationsExceeded : public Error {
public:
    MaxIterationsExceeded(CoefficientTuple best, SolveStats stats, const std::string& what)
        : Error(what), best_(std::move(best)), stats_(std::move(stats)) {}
    const CoefficientTuple& best() const { return best_; }
    const SolveStats& stats() const { return stats_; }

private:
    CoefficientTuple best_;
    SolveStats stats_;
};

// Riesz representative of 2Av + b in a metric on the free coefficients.
class GradientMap {
public:
    GradientMap(const AssembledForms& forms, Metric metric, int dim);
    ~GradientMap();
    GradientMap(GradientMap&&) noexcept;
    GradientMap& operator=(GradientMap&&) noexcept;

    CoefficientTuple operator()(const QuadraticCost& cost, const CoefficientTuple& v) const;

private:
    struct Impl;
    Metric metric_;
    int node_count_, dim_;
    std::unique_ptr<Impl> impl_;
};

// Everything a level solve needs besides the iterate.
struct LevelProblem {
    QuadraticCost cost;
    const ConstraintSet* constraints;
    const Projector* projector;
    const GradientMap* gradient;
    const AssembledForms* forms;
    SparseMatrix stationarity_form; // empty for the Euclidean norm
};

double stationarity(const CoefficientTuple& v, const LevelProblem& problem);

// Convenience form building the projector and gradient map from config.
double stationarity(const CoefficientTuple& v, const QuadraticCost& cost, const ConstraintSet& cs,
                    const AssembledForms& forms, const OptimizerConfig& config);

struct ArmijoResult {
    double sigma = 0.0;
    CoefficientTuple v;
    double cost = 0.0;
    double decrease = 0.0;
    int backtracks = 0;
};

ArmijoResult armijo_step(const CoefficientTuple& v, const LevelProblem& problem, const OptimizerConfig& config);

ArmijoResult armijo_step(const CoefficientTuple& v, const QuadraticCost& cost, const ConstraintSet& cs,
                         const AssembledForms& forms, const OptimizerConfig& config);

struct LevelResult {
    CoefficientTuple r_next;
    SolveStats stats;
};

// Minimizes the cost over the constraint set starting from `start`.
LevelResult minimize(const CoefficientTuple& start, const QuadraticCost& cost, const ConstraintSet& cs,
                     const AssembledForms& forms, const OptimizerConfig& config);

// Reusable per-grid state (gradient-map factorization, load tuple).
class LevelSolver {
public:
    LevelSolver(const Grid& grid, const AssembledForms& forms, const ModelParams& params, const ForceField& force,
                const OptimizerConfig& config);
    ~LevelSolver();
    LevelSolver(LevelSolver&&) noexcept;

    LevelResult solve(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, double tau,
                      ConstraintDensity density) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

LevelResult solve_time_level(const CoefficientTuple& r_k, const CoefficientTuple& r_km1, const ForceField& force,
                             const ModelParams& params, double tau, ConstraintDensity density,
                             const AssembledForms& forms, const Grid& grid, const OptimizerConfig& config);

} // namespace fiber
