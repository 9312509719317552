#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "fracvar/problem.hpp"

namespace fracvar {

/// Reference solution declared by a config for convergence studies: either a
/// named classical-limit tag or an explicit expression of x.
struct OracleSpec {
  std::string tag;         // "line", "area_constrained", "free_end_constant"
  std::string expression;  // exact trajectory as an expression of x
};

/// A grid-bound parameter before sampling: an expression of x, optionally
/// pushed through an operator ("none" samples the expression directly).
struct GridParamSpec {
  std::string name;
  std::string op;
  std::string expression;
};

/// A problem file resolved into a solvable Problem. The grid-parameter
/// specs are kept so the problem can be re-sampled on other grids.
struct ProblemConfig {
  Problem problem;
  std::optional<OracleSpec> oracle;
  std::vector<GridParamSpec> grid_param_specs;
};

/// Config rejection with the offending field path ("orders.alpha", ...).
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(const std::string& field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field(field) {}
};

/// Parses a JSON problem document. Unknown keys anywhere are errors.
ProblemConfig parse_problem_config(const std::string& json_text);

/// Reads and parses a file; nonexistent/unreadable paths raise ConfigError.
ProblemConfig load_problem_config(const std::string& path);

/// Re-runs the config with a different grid size (convergence studies).
ProblemConfig with_grid_size(const ProblemConfig& cfg, std::size_t n);

/// Operator lookup for CLI flags and grid-parameter specs. Accepts
/// "rlfi-left", "rlfi-right", "rlfd-left", "rlfd-right", "cfd-left",
/// "cfd-right", "combined-caputo", "dual-rl"; unknown names throw
/// std::invalid_argument.
OperatorKind operator_kind_from_name(const std::string& name);
SampledFunction apply_named_operator(const std::string& name,
                                     const SampledFunction& f,
                                     const FracParams& p);

/// Samples the config's oracle on a grid (tag via the classical-limit
/// solutions, expression via the parser). Requires cfg.oracle.
Trajectory sample_oracle(const ProblemConfig& cfg, const Grid& grid);

}  // namespace fracvar
