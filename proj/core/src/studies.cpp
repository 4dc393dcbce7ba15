#include <fiber/studies.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace fiber {

namespace {

// Runs task(0..count-1) on up to `threads` workers. Exceptions are not
// expected out of tasks; each task records its own failure.
template <class Task>
void parallel_for(int count, int threads, Task task)
{
    threads = std::clamp(threads, 1, std::max(count, 1));
    if (threads == 1) {
        for (int i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++)
                task(i);
        });
    for (auto& t : pool)
        t.join();
}

double sum_ms(const Trajectory& traj)
{
    return std::accumulate(traj.wall_ms.begin(), traj.wall_ms.end(), 0.0);
}

struct RowRun {
    CoefficientTuple final_state;
    ConvergenceRow row;
};

} // namespace

void StudyOptions::validate() const
{
    params.validate();
    config.validate();
    if (!(t_star > 0.0) || !(base_tau > 0.0))
        throw InvalidConfiguration("study times must be positive");
    if (first_index < 0 || last_index < first_index)
        throw InvalidConfiguration("study index range is empty");
    if (reference_index < first_index || reference_index > last_index)
        throw InvalidConfiguration("reference index outside the study range");
    if (node_count < 3)
        throw InvalidConfiguration("study needs at least 3 nodes");
    for (int i = first_index; i <= last_index; ++i)
        level_count(t_star, std::ldexp(base_tau, -i));
}

int study_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("FIBER_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<int>(v);
        throw InvalidConfiguration("FIBER_THREADS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const ConvergenceRow& ConvergenceReport::row(int index) const
{
    for (const auto& r : rows)
        if (r.index == index)
            return r;
    throw InvalidConfiguration("convergence report has no row " + std::to_string(index));
}

bool ConvergenceReport::ok() const
{
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.failure.empty(); });
}

double loglog_slope(const std::vector<double>& tau, const std::vector<double>& y)
{
    if (tau.size() != y.size() || tau.size() < 2)
        throw InvalidConfiguration("loglog_slope needs two or more matching samples");
    const auto n = static_cast<double>(tau.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (!(tau[i] > 0.0) || !(y[i] > 0.0))
            throw InvalidConfiguration("loglog_slope needs positive samples");
        const double x = std::log(tau[i]), v = std::log(y[i]);
        sx += x;
        sy += v;
        sxx += x * x;
        sxy += x * v;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport run_convergence_study(const ForceField& force, ConstraintDensity density,
                                        const StudyOptions& options)
{
    options.validate();
    const int count = options.last_index - options.first_index + 1;
    std::vector<RowRun> runs(count);

    parallel_for(count, study_threads(options.threads), [&](int slot) {
        RowRun& out = runs[slot];
        out.row.index = options.first_index + slot;
        out.row.tau = std::ldexp(options.base_tau, -out.row.index);
        Scenario sc;
        sc.force = force;
        sc.params = options.params;
        sc.params.end_time = options.t_star;
        sc.tau = out.row.tau;
        sc.node_count = options.node_count;
        sc.density = density;
        sc.config = options.config;
        try {
            const Trajectory traj = run(sc);
            out.final_state = traj.states.back();
            out.row.dl = traj.elongations.back();
            out.row.iters_total = traj.total_iterations();
            out.row.iters_avg = static_cast<double>(out.row.iters_total) / traj.levels();
            if (options.record_timing)
                out.row.wall_ms = sum_ms(traj);
        } catch (const Error& e) {
            out.row.failure = e.what();
        }
    });

    ConvergenceReport report;
    report.case_label = force_name(force);
    report.density = density;
    report.t_star = options.t_star;
    report.reference_index = options.reference_index;
    const RowRun& ref = runs[options.reference_index - options.first_index];
    const Grid grid(options.params.length, options.node_count);
    const AssembledForms forms = assemble_forms(grid);
    for (auto& r : runs) {
        if (r.row.failure.empty() && !ref.row.failure.empty())
            r.row.failure = "reference run failed";
        if (r.row.failure.empty()) {
            const CoefficientTuple diff = r.final_state - ref.final_state;
            r.row.error_l2 = l2_norm(diff, forms);
            double mx = 0.0, sq = 0.0;
            for (int j = 0; j < grid.node_count(); ++j) {
                const double e = diff.value(j).norm();
                mx = std::max(mx, e);
                sq += e * e;
            }
            r.row.error_max = mx;
            r.row.error_nodal = std::sqrt(sq);
        }
        report.rows.push_back(r.row);
    }
    return report;
}

bool ElongationReport::ok() const
{
    for (const auto& row : failure)
        for (const auto& f : row)
            if (!f.empty())
                return false;
    return true;
}

ElongationReport run_elongation_study(const ForceField& force, const std::vector<ConstraintDensity>& densities,
                                      const StudyOptions& options)
{
    options.validate();
    if (densities.empty())
        throw InvalidConfiguration("elongation study needs at least one density");
    const int nt = options.last_index - options.first_index + 1;
    const int nd = static_cast<int>(densities.size());
    ElongationReport report;
    report.case_label = force_name(force);
    report.densities = densities;
    for (int i = options.first_index; i <= options.last_index; ++i)
        report.taus.push_back(std::ldexp(options.base_tau, -i));
    report.dl.assign(nd, std::vector<double>(nt, 0.0));
    report.failure.assign(nd, std::vector<std::string>(nt));

    parallel_for(nd * nt, study_threads(options.threads), [&](int task) {
        const int d = task / nt, i = task % nt;
        Scenario sc;
        sc.force = force;
        sc.params = options.params;
        sc.params.end_time = options.t_star;
        sc.tau = report.taus[i];
        sc.node_count = options.node_count;
        sc.density = densities[d];
        sc.config = options.config;
        try {
            report.dl[d][i] = run(sc).elongations.back();
        } catch (const Error& e) {
            report.failure[d][i] = e.what();
        }
    });
    return report;
}

const BoundRun& BoundReport::run(ConstraintDensity d) const
{
    for (const auto& r : runs)
        if (r.density == d)
            return r;
    throw InvalidConfiguration("bound report has no " + to_string(d) + " run");
}

BoundReport run_bound_scenario(const BoundOptions& options)
{
    options.params.validate();
    options.config.validate();
    if (options.densities.empty())
        throw InvalidConfiguration("bound scenario needs at least one density");
    level_count(options.params.end_time, options.tau);
    

    BoundReport report;
    report.tau = options.tau;
    report.horizon = options.params.end_time;
    report.runs.resize(options.densities.size());
    const int count = static_cast<int>(options.densities.size());
    parallel_for(count, study_threads(options.threads), [&](int d) {
        BoundRun& out = report.runs[d];
        out.density = options.densities[d];
        Scenario sc;
        sc.force = CombinedForce{options.params.omega};
        sc.params = options.params;
        sc.tau = options.tau;
        sc.node_count = options.node_count;
        sc.density = out.density;
        sc.config = options.config;
        try {
            out.trajectory = fiber::run(sc);
        } catch (const LevelFailure& e) {
            out.trajectory = e.partial();
            out.failure = e.what();
        } catch (const Error& e) {
            out.failure = e.what();
        }
        if (!options.record_timing)
            std::fill(out.trajectory.wall_ms.begin(), out.trajectory.wall_ms.end(), 0.0);
        if (!out.trajectory.states.empty())
            out.series = check_elongation_bound(out.trajectory);
    });
    return report;
}

} // namespace fiber
