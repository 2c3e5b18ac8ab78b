#pragma once

#include "qstab/qcqp.hpp"

#include <json.hpp>

namespace qstab {

// {N, G (row-major), constraints: [{H, b}], hom_index}
nlohmann::json problem_to_json(const HomQCQP& p);
HomQCQP problem_from_json(const nlohmann::json& j);

// Finite doubles round-trip exactly through these.
std::string problem_to_string(const HomQCQP& p);
HomQCQP problem_from_string(const std::string& s);

}  // namespace qstab
