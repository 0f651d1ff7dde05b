#include "iliosim/fluoro.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::fluoro {

using json_util::json;

namespace {

ViewSpec make_view(ViewName name, const Vec3& isocenter, const Vec3& beam, const ViewParams& params) {
  ViewSpec v;
  v.name = name;
  v.detector_normal = beam.normalized();
  v.source = isocenter - params.source_to_isocenter * v.detector_normal;
  v.detector_center = v.source + params.source_to_detector * v.detector_normal;
  v.up = reject(Vec3::UnitZ(), v.detector_normal).normalized();
  v.detector_diameter = params.detector_diameter;
  return v;
}

std::string fixed6(double x) {
  std::string s = fmt::format("{:.6f}", x);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void append_points(std::string& out, const std::vector<Vec2>& pts) {
  out += '[';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += ", ";
    out += fmt::format("[{}, {}]", fixed6(pts[i].x()), fixed6(pts[i].y()));
  }
  out += ']';
}

std::vector<Vec2> read_points(const json& arr, const char* ctx) {
  if (!arr.is_array()) throw Error(ErrorCode::ValidationError, std::string(ctx) + " must be an array");
  std::vector<Vec2> pts;
  pts.reserve(arr.size());
  for (const auto& p : arr) pts.push_back(json_util::get_vec2(p, ctx));
  return pts;
}

}  // namespace

std::string_view to_string(ViewName name) {
  switch (name) {
    case ViewName::Inlet: return "Inlet";
    case ViewName::Outlet: return "Outlet";
    case ViewName::AP: return "AP";
  }
  return "AP";
}

ViewName view_from_string(std::string_view text) {
  if (text == "Inlet" || text == "INLET" || text == "inlet") return ViewName::Inlet;
  if (text == "Outlet" || text == "OUTLET" || text == "outlet") return ViewName::Outlet;
  if (text == "AP" || text == "ap") return ViewName::AP;
  throw Error(ErrorCode::InvalidCommand, "unknown view '" + std::string(text) + "'");
}

const ViewSpec& view(const ViewSpecs& views, ViewName name) { return views[static_cast<std::size_t>(name)]; }

ViewSpecs standard_views(const anatomy::AnatomyModel& model, const ViewParams& params) {
  auto valid_tilt = [](double deg) { return std::isfinite(deg) && deg > 0.0 && deg < 90.0; };
  if (!valid_tilt(params.inlet_tilt_deg) || !valid_tilt(params.outlet_tilt_deg)) {
    throw Error(ErrorCode::InvalidAngle, "inlet/outlet tilt must lie in (0, 90) degrees");
  }
  if (!(params.source_to_detector > 0.0)) {
    throw Error(ErrorCode::ValidationError, "source_to_detector must be positive");
  }
  if (!(params.source_to_isocenter > 0.0 && params.source_to_isocenter < params.source_to_detector)) {
    throw Error(ErrorCode::ValidationError, "source_to_isocenter must lie in (0, source_to_detector)");
  }
  if (!(params.detector_diameter > 0.0)) {
    throw Error(ErrorCode::ValidationError, "detector_diameter must be positive");
  }
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double a = params.inlet_tilt_deg * kDeg;
  const double b = params.outlet_tilt_deg * kDeg;
  const Vec3& iso = model.corridor.center;
  ViewSpecs views;
  views[static_cast<std::size_t>(ViewName::Inlet)] =
      make_view(ViewName::Inlet, iso, Vec3(0.0, -std::cos(a), -std::sin(a)), params);
  views[static_cast<std::size_t>(ViewName::Outlet)] =
      make_view(ViewName::Outlet, iso, Vec3(0.0, -std::cos(b), std::sin(b)), params);
  views[static_cast<std::size_t>(ViewName::AP)] = make_view(ViewName::AP, iso, -Vec3::UnitY(), params);
  return views;
}

ViewSpecs standard_views(const anatomy::AnatomyModel& model, double inlet_tilt_deg, double outlet_tilt_deg,
                         double source_to_detector) {
  ViewParams params;
  params.inlet_tilt_deg = inlet_tilt_deg;
  params.outlet_tilt_deg = outlet_tilt_deg;
  params.source_to_isocenter *= source_to_detector / params.source_to_detector;
  params.source_to_detector = source_to_detector;
  return standard_views(model, params);
}

Vec2 project_point(const ViewSpec& v, const Vec3& p) {
  const Vec3 ray = p - v.source;
  const double along = ray.dot(v.detector_normal);
  if (!(along > 0.0)) throw Error(ErrorCode::BehindSource, "point is not in front of the X-ray source");
  const Vec3 hit = v.source + ray * (v.source_to_detector() / along);
  const Vec3 rel = hit - v.detector_center;
  return {rel.dot(v.detector_u()), rel.dot(v.up)};
}

Radiograph render_radiograph(const ViewSpec& v, const anatomy::AnatomyModel& model, const WirePose& pose,
                             int seq, double taken_at) {
  Radiograph img;
  img.view_name = v.name;
  img.seq = seq;
  img.taken_at = taken_at;

  const Vec2 entry = project_point(v, pose.entry);
  img.wire_2d.push_back(entry);
  if (pose.depth > 0.0) {
    const Vec2 tip = project_point(v, pose.tip());
    if ((tip - entry).norm() > 1e-9) img.wire_2d.push_back(tip);
  }

  const anatomy::CorridorSpec& c = model.corridor;
  const Vec3 minor = c.minor_dir();
  const int n = kSilhouetteSamples;
  for (const double side : {-1.0, 1.0}) {
    Polyline cap{side < 0 ? "cap.lateral" : "cap.medial", {}};
    const Vec3 base = c.center + side * c.half_length * c.axis;
    for (int k = 0; k <= n; ++k) {
      const double theta = 2.0 * std::numbers::pi * (k % n) / n;
      const Vec3 p = base + c.semi_axis_long * std::cos(theta) * c.major_dir +
                     c.semi_axis_short * std::sin(theta) * minor;
      cap.points.push_back(project_point(v, p));
    }
    img.silhouette.push_back(std::move(cap));
  }
  const std::array<std::pair<const char*, Vec3>, 4> edges{{
      {"edge.major+", c.semi_axis_long * c.major_dir},
      {"edge.major-", -c.semi_axis_long * c.major_dir},
      {"edge.minor+", c.semi_axis_short * minor},
      {"edge.minor-", -c.semi_axis_short * minor},
  }};
  for (const auto& [label, offset] : edges) {
    Polyline edge{label, {}};
    for (int k = 0; k < n; ++k) {
      const double t = -c.half_length + 2.0 * c.half_length * k / (n - 1);
      edge.points.push_back(project_point(v, c.center + offset + t * c.axis));
    }
    img.silhouette.push_back(std::move(edge));
  }
  const Vec3 mark = anatomy::skin_landmark(model);
  const auto [tu, tv] = anatomy::skin_tangents(model);
  constexpr double kArm = 10.0;
  img.silhouette.push_back({"landmark.a", {project_point(v, mark - kArm * tu), project_point(v, mark + kArm * tu)}});
  img.silhouette.push_back({"landmark.b", {project_point(v, mark - kArm * tv), project_point(v, mark + kArm * tv)}});

  const double radius = v.detector_diameter / 2.0;
  auto outside = [radius](const Vec2& q) { return q.norm() > radius; };
  for (const auto& q : img.wire_2d) img.clipped = img.clipped || outside(q);
  for (const auto& line : img.silhouette) {
    for (const auto& q : line.points) img.clipped = img.clipped || outside(q);
  }
  return img;
}

std::string radiograph_to_text(const Radiograph& img) {
  std::string out = "{\n";
  out += fmt::format("  \"clipped\": {},\n", img.clipped ? "true" : "false");
  out += fmt::format("  \"seq\": {},\n", img.seq);
  out += "  \"silhouette\": [\n";
  for (std::size_t i = 0; i < img.silhouette.size(); ++i) {
    out += fmt::format("    {{\"label\": \"{}\", \"points\": ", img.silhouette[i].label);
    append_points(out, img.silhouette[i].points);
    out += i + 1 < img.silhouette.size() ? "},\n" : "}\n";
  }
  out += "  ],\n";
  out += fmt::format("  \"taken_at\": {},\n", fixed6(img.taken_at));
  out += fmt::format("  \"view_name\": \"{}\",\n", to_string(img.view_name));
  out += "  \"wire_2d\": ";
  append_points(out, img.wire_2d);
  out += "\n}\n";
  return out;
}

Radiograph radiograph_from_json(const json& doc) {
  Radiograph img;
  img.clipped = json_util::get_bool(json_util::require(doc, "clipped", "radiograph"), "clipped");
  img.seq = static_cast<int>(json_util::get_int(json_util::require(doc, "seq", "radiograph"), "seq"));
  img.view_name = view_from_string(json_util::get_string(json_util::require(doc, "view_name", "radiograph"), "view_name"));
  img.taken_at = json_util::get_number(json_util::require(doc, "taken_at", "radiograph"), "taken_at");
  img.wire_2d = read_points(json_util::require(doc, "wire_2d", "radiograph"), "wire_2d");
  for (const auto& line : json_util::require(doc, "silhouette", "radiograph")) {
    img.silhouette.push_back({json_util::get_string(json_util::require(line, "label", "silhouette"), "label"),
                              read_points(json_util::require(line, "points", "silhouette"), "points")});
  }
  return img;
}

json view_params_to_json(const ViewParams& p) {
  return {{"inlet_tilt_deg", p.inlet_tilt_deg},
          {"outlet_tilt_deg", p.outlet_tilt_deg},
          {"source_to_detector", p.source_to_detector},
          {"source_to_isocenter", p.source_to_isocenter},
          {"detector_diameter", p.detector_diameter}};
}

ViewParams view_params_from_json(const json& doc) {
  ViewParams p;
  if (doc.is_null()) return p;
  if (!doc.is_object()) throw Error(ErrorCode::ValidationError, "view parameters must be an object");
  auto read = [&doc](const char* key, double& field) {
    if (doc.contains(key)) field = json_util::get_number(doc[key], key);
  };
  read("inlet_tilt_deg", p.inlet_tilt_deg);
  read("outlet_tilt_deg", p.outlet_tilt_deg);
  read("source_to_detector", p.source_to_detector);
  read("source_to_isocenter", p.source_to_isocenter);
  read("detector_diameter", p.detector_diameter);
  return p;
}

json view_spec_to_json(const ViewSpec& v) {
  return {{"name", to_string(v.name)},
          {"source", json_util::to_json(v.source)},
          {"detector_center", json_util::to_json(v.detector_center)},
          {"detector_normal", json_util::to_json(v.detector_normal)},
          {"up", json_util::to_json(v.up)},
          {"detector_diameter", v.detector_diameter}};
}

}  // namespace iliosim::fluoro
