#pragma once
//
// Subcommand bodies. Each returns the process exit code: 0 success,
// 1 configuration or solver failure, 2 I/O failure. Diagnostics go to err.
//

#include <iosfwd>
#include <string>
#include <vector>

namespace fiber::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitIo = 2;

// Writes trajectory.csv, elongation.csv and stats.csv into out_dir.
int simulate(const std::string& config_path, const std::string& out_dir, bool timing, std::ostream& err);

// kind: convergence | elongation | bound.
int study(const std::string& config_path, const std::string& kind, const std::string& out_dir, std::ostream& err);

int render(const std::string& trajectory_path, const std::string& out_path, const std::string& times,
           std::ostream& err);

} // namespace fiber::cli
