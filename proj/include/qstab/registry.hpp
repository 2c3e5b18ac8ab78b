#pragma once

#include "qstab/problems.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace qstab {

struct RegistryEntry {
  std::string name;
  std::string summary;
  std::string params;  // accepted keys and defaults
};

const std::vector<RegistryEntry>& registered_problems();

// Throws InvalidInput on an unknown name or bad parameters.
ParametricProblem make_problem(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

GraphSpec graph_from_json(const nlohmann::json& j, const GraphSpec& fallback);

}  // namespace qstab
