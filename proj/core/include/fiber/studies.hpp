#pragma once
//
// Time-step refinement studies: error and elongation at t* for
// tau_i = 2^-i * 1e-3, and the elongation-bound scenario.
//
// Rows are independent and run on up to FIBER_THREADS threads (default:
// hardware concurrency); results are ordered by i, so reports do not depend
// on scheduling. Wall time is only recorded when asked for.
//

#include <fiber/time_stepper.hpp>

#include <string>
#include <vector>

namespace fiber {

struct StudyOptions {
    ModelParams params;       // end_time is overridden by t_star
    double t_star = 1e-3;
    int first_index = 0;
    int last_index = 7;       // tau_i for i in [first_index, last_index]
    int reference_index = 7;
    double base_tau = 1e-3;
    int node_count = 300;
    OptimizerConfig config;
    bool record_timing = false;
    int threads = 0;          // 0: FIBER_THREADS or hardware concurrency

    void validate() const;
};

// Threads to use: explicit, else FIBER_THREADS, else hardware concurrency.
int study_threads(int requested);

struct ConvergenceRow {
    int index = 0;
    double tau = 0.0;
    double error_l2 = 0.0;    // L2(0, l) norm of the difference to the reference run
    double error_max = 0.0;   // max over nodes of |v_j - w_j|
    double error_nodal = 0.0; // sqrt(sum over nodes |v_j - w_j|^2)
    double dl = 0.0;
    long iters_total = 0;
    double iters_avg = 0.0;
    double wall_ms = 0.0;
    std::string failure;      // empty on success
};

struct ConvergenceReport {
    std::string case_label;
    ConstraintDensity density = ConstraintDensity::Nodal;
    double t_star = 1e-3;
    int reference_index = 7;
    std::vector<ConvergenceRow> rows;

    const ConvergenceRow& row(int index) const;
    bool ok() const;
};

// Least-squares slope of log(y) against log(tau).
double loglog_slope(const std::vector<double>& tau, const std::vector<double>& y);

ConvergenceReport run_convergence_study(const ForceField& force, ConstraintDensity density,
                                        const StudyOptions& options);

struct ElongationReport {
    std::string case_label;
    std::vector<double> taus;
    std::vector<ConstraintDensity> densities;
    std::vector<std::vector<double>> dl;            // [density][tau]
    std::vector<std::vector<std::string>> failure;  // [density][tau]
    bool ok() const;
};

ElongationReport run_elongation_study(const ForceField& force, const std::vector<ConstraintDensity>& densities,
                                      const StudyOptions& options);

struct BoundOptions {
    ModelParams params;       // end_time is the horizon
    double tau = 1.25e-4;
    int node_count = 300;
    OptimizerConfig config;
    std::vector<ConstraintDensity> densities{ConstraintDensity::Nodal, ConstraintDensity::Half,
                                             ConstraintDensity::Third};
    bool record_timing = false;
    int threads = 0;

    BoundOptions() { params.end_time = 0.05; }
};

struct BoundRun {
    ConstraintDensity density = ConstraintDensity::Nodal;
    Trajectory trajectory;    // partial on failure
    BoundSeries series;
    std::string failure;
};

struct BoundReport {
    double tau = 0.0;
    double horizon = 0.0;
    std::vector<BoundRun> runs;
    const BoundRun& run(ConstraintDensity d) const;
};

BoundReport run_bound_scenario(const BoundOptions& options);

} // namespace fiber
