#pragma once

#include <json.hpp>
#include <string>

#include "miuralab/grid.hpp"

namespace miuralab {

nlohmann::json field_to_json(const Field& f);
Field field_from_json(const nlohmann::json& j);

Field read_field(const std::string& path);
void write_field_json(const Field& f, const std::string& path);
void write_field_csv(const Field& f, const std::string& path);

// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace miuralab
