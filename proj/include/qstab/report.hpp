#pragma once

#include "qstab/stability.hpp"

#include <json.hpp>

#include <string>

namespace qstab {

// Non-finite values become the strings "inf", "-inf", "nan".
nlohmann::json json_number(double v);
nlohmann::json json_vector(const Vector& v);

nlohmann::json certificate_to_json(const GapCertificate& c, bool include_timing = true);
nlohmann::json stability_to_json(const StabilityReport& r);
nlohmann::json slater_to_json(const RestrictedSlater& rs);

// %.12e, with inf/nan spelled out.
std::string format_number(double v);

}  // namespace qstab
