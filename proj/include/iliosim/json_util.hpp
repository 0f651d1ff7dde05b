#pragma once

// Small helpers shared by every document reader/writer.

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "iliosim/error.hpp"
#include "iliosim/geometry.hpp"

namespace iliosim::json_util {

using nlohmann::json;

json parse(std::string_view text, std::string_view what);

// Writes with sorted keys and two-space indent. Doubles use the shortest
// round-trip representation, so parse(canonical(j)) reproduces j exactly.
std::string canonical(const json& j);

const json& require(const json& obj, std::string_view key, std::string_view ctx);

double get_number(const json& v, std::string_view ctx);
std::int64_t get_int(const json& v, std::string_view ctx);
std::uint64_t get_uint(const json& v, std::string_view ctx);
bool get_bool(const json& v, std::string_view ctx);
std::string get_string(const json& v, std::string_view ctx);
Vec3 get_vec3(const json& v, std::string_view ctx);
Vec2 get_vec2(const json& v, std::string_view ctx);

json to_json(const Vec3& v);
json to_json(const Vec2& v);

// Rejects documents whose format_version differs from `expected`.
void check_version(const json& doc, int expected, std::string_view ctx);

}  // namespace iliosim::json_util
