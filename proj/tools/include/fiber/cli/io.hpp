#pragma once
//
// Text output: shortest round-trip decimals, trajectory files (a "# " JSON
// header line followed by CSV, one row per time level) and study reports.
//

#include <fiber/cli/config.hpp>

#include <iosfwd>
#include <string>

namespace fiber::cli {

std::string format_double(double x);
double parse_double(const std::string& text);

struct TrajectoryFile {
    nlohmann::json header;
    Trajectory trajectory;
};

// Header carries the config echo, grid and time step.
TrajectoryFile make_trajectory_file(const RunConfig& config, const Trajectory& traj);

void write_trajectory(std::ostream& out, const TrajectoryFile& file);
TrajectoryFile read_trajectory(std::istream& in);

void write_elongation_csv(std::ostream& out, const Trajectory& traj);
void write_stats_csv(std::ostream& out, const Trajectory& traj, bool timing);

// tau,error_L2,error_max,error_nodal,dl,iters_total,iters_avg,wall_ms,failure
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);
// tau,dl_<density>...
void write_elongation_report_csv(std::ostream& out, const ElongationReport& report);
// k,t,bound,dl_<density>...
void write_bound_csv(std::ostream& out, const BoundReport& report);
// density,satisfied,first_violation,levels,failure
void write_bound_summary_csv(std::ostream& out, const BoundReport& report);

// File helpers raising IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace fiber::cli
