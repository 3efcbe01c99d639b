#pragma once

#include <string>

#include <json.hpp>

#include "hypersr/gp.hpp"

namespace hypersr {

// JSON form of GpConfig. The search keys are required:
//   population_size, generations, stopping_criteria, p_crossover,
//   p_subtree_mutation, p_hoist_mutation, p_point_mutation, max_samples,
//   parsimony_coefficient
// The engine keys are optional and fall back to their defaults:
//   tournament_size, init_depth ([min, max]), function_set (operator names),
//   constant_range ([lo, hi]), seed, fd_step
// Missing required keys and unknown keys raise std::invalid_argument naming
// the key.
GpConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const GpConfig& cfg);

GpConfig load_config(const std::string& path);

}  // namespace hypersr
