#include "iliosim/json_util.hpp"

#include <cmath>

namespace iliosim::json_util {

json parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

std::string canonical(const json& j) { return j.dump(2) + "\n"; }

const json& require(const json& obj, std::string_view key, std::string_view ctx) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::MissingField, std::string(ctx) + "." + std::string(key));
  }
  return *it;
}

double get_number(const json& v, std::string_view ctx) {
  if (!v.is_number()) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be finite");
  }
  return x;
}

std::int64_t get_int(const json& v, std::string_view ctx) {
  if (!v.is_number_integer()) throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " is out of range");
  }
  return v.get<std::int64_t>();
}

std::uint64_t get_uint(const json& v, std::string_view ctx) {
  if (!v.is_number_unsigned()) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool get_bool(const json& v, std::string_view ctx) {
  if (!v.is_boolean()) throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& v, std::string_view ctx) {
  if (!v.is_string()) throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be a string");
  return v.get<std::string>();
}

Vec3 get_vec3(const json& v, std::string_view ctx) {
  if (!v.is_array() || v.size() != 3) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be an array of 3 numbers");
  }
  return {get_number(v[0], ctx), get_number(v[1], ctx), get_number(v[2], ctx)};
}

Vec2 get_vec2(const json& v, std::string_view ctx) {
  if (!v.is_array() || v.size() != 2) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be an array of 2 numbers");
  }
  return {get_number(v[0], ctx), get_number(v[1], ctx)};
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

void check_version(const json& doc, int expected, std::string_view ctx) {
  const json& v = require(doc, "format_version", ctx);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::ValidationError, std::string(ctx) + ".format_version must be an integer");
  }
  if (v.get<int>() != expected) {
    throw Error(ErrorCode::VersionMismatch,
                std::string(ctx) + " has format_version " + std::to_string(v.get<int>()) +
                    ", expected " + std::to_string(expected));
  }
}

}  // namespace iliosim::json_util
