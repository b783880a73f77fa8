#pragma once

#include "rlr/harness.hpp"

#include <string>

namespace rlr {

/// Parses the experiment spec text format: `key = value` lines, `[table]`
/// headers for target / covspec / noisespec / solver, '#' comments. Values are
/// numbers, double-quoted strings, booleans or bracketed number lists.
/// `base_dir` resolves a relative target.path.
ExperimentSpec parse_experiment_spec(const std::string& text, const std::string& base_dir = ".");

ExperimentSpec load_experiment_spec(const std::string& path);

} // namespace rlr
