#pragma once

#include <filesystem>

#include <json.hpp>

#include "lpzeros/best_approx.hpp"
#include "lpzeros/measure.hpp"

namespace lpzeros::app {

/// Everything a run needs: the measure family, the solver settings and the
/// near-coincidence tolerance used by the sensitivity report.
struct ProblemConfig {
  ParametricMeasure<double> measure;
  SolverConfig<double> solver;
  double coincidence_tol = 1e-12;
};

/// Strict parse: unknown keys, wrong types and out-of-range values raise
/// ConfigError naming the offending field.
ProblemConfig parse_config(const nlohmann::json& doc);

ProblemConfig load_config(const std::filesystem::path& path);

}  // namespace lpzeros::app
