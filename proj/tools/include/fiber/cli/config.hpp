#pragma once
//
// JSON run configuration. Unknown keys are rejected with the offending path
// so typos do not silently fall back to defaults.
//
//   model:       omega, bend, l, T, dim, gravityDir
//   grid:        M
//   time:        tau
//   force:       kind (zero | caseA | caseB | combined | tabulated), params
//   constraints: density (nodal | half | third)
//   optimizer:   tolA, tolR, maxIter, sigma0, beta, c, sigmaMin, projection,
//                gradientMetric, stationarityNorm, start, rankPolicy, rankTolerance
//   study:       cases, density, densities, tStar, firstIndex, lastIndex,
//                referenceIndex, baseTau, timing, threads
//

#include <fiber/studies.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace fiber::cli {

struct StudySection {
    std::vector<std::string> cases{"caseA", "caseB"};
    ConstraintDensity density = ConstraintDensity::Nodal;
    std::vector<ConstraintDensity> densities{ConstraintDensity::Nodal, ConstraintDensity::Half};
    double t_star = 1e-3;
    int first_index = 0;
    int last_index = 7;
    int reference_index = 7;
    double base_tau = 1e-3;
    bool timing = false;
    int threads = 0;
};

struct RunConfig {
    Scenario scenario;
    StudySection study;
};

RunConfig parse_config(const nlohmann::json& doc);

// Reads and parses; file errors raise IoError.
RunConfig load_config(const std::string& path);

// Canonical JSON echo of a configuration (all keys, defaults filled in).
nlohmann::json to_json(const RunConfig& config);

ForceField parse_force(const nlohmann::json& doc, const ModelParams& params);

StudyOptions study_options(const RunConfig& config);
BoundOptions bound_options(const RunConfig& config);

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace fiber::cli
