#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gptik/geometry.hpp"
#include "gptik/objectives.hpp"
#include "gptik/schedules.hpp"
#include "gptik/solver.hpp"
#include "gptik/types.hpp"

namespace gptik::config {

/// Malformed experiment description. The message always names the offending
/// field by its dotted path (e.g. "problem.set.radius: must be positive").
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Optional per-check tolerance overrides for the verify pipeline; absent
/// entries use the documented defaults.
struct VerifyThresholds {
  std::optional<double> f_gap;           // default 1e-6 * (1 + |f_star|)
  std::optional<double> dist_to_target;  // default 1e-2
  std::optional<double> dist_to_set;     // default 1e-4
  std::optional<double> spread;          // default 1e-2
};

/// A fully resolved experiment: problem, schedule, starts, and harness
/// settings. Random starts are already expanded to concrete vectors (the
/// seed fully determines them).
struct Experiment {
  objectives::SmoothObjective objective;
  geometry::ConvexSet set;
  std::optional<objectives::Regularizer> regularizer;
  schedules::Schedule schedule;
  solver::Mode mode = solver::Mode::gp;
  std::vector<Vector> starts;
  solver::StopRule stop;
  long log_every = 0;  // 0 = geometric decimation
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  VerifyThresholds verify;
  /// Set when the config requested {"random": N} starts; a later seed
  /// override re-samples them.
  std::optional<int> random_starts;

  /// The problem instance for one start (validates and projects the start).
  solver::ProblemInstance instance(std::size_t start_index) const;
};

/// Parses the JSON text of an experiment config. Throws ConfigError with a
/// field-path diagnostic on any malformed input.
Experiment parse_experiment_text(const std::string& json_text);

/// Reads and parses a config file.
Experiment load_experiment(const std::string& path);

}  // namespace gptik::config
