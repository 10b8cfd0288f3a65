#pragma once

#include <string>

#include "knninfo/experiments.hpp"

namespace knninfo {

/// Load an ExperimentSpec from the key-value config format documented in
/// the README ([experiment] and [distribution] sections).
ExperimentSpec parse_experiment_config(const std::string& path);
ExperimentSpec parse_experiment_config_text(const std::string& text, const std::string& origin);

/// Serialize a spec back to config text; parsing it again reproduces the
/// spec exactly.
std::string experiment_config_text(const ExperimentSpec& spec);

}  // namespace knninfo
