#include "iliosim/anatomy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::anatomy {

using json_util::json;

namespace {

Vec3 default_antero_cranial(const Vec3& axis) {
  Vec3 v = reject(Vec3(0.0, 1.0, 1.0), axis);
  if (v.norm() < 1e-12) v = reject(Vec3::UnitY(), axis);
  return v.normalized();
}

Plane sufficiency_default(const CorridorSpec& c) { return {c.center, c.axis}; }

Plane far_cortex_default(const CorridorSpec& c) {
  return {c.center + c.half_length * c.axis, c.axis};
}

// Distance from the origin to the ellipse (e0, e1) along the normal line
// through a first-quadrant point; bisection on the Lagrange parameter.
double ellipse_root(double r0, double z0, double z1, double g) {
  const double n0 = r0 * z0;
  double s0 = z1 - 1.0;
  double s1 = g < 0.0 ? 0.0 : std::hypot(n0, z1) - 1.0;
  double s = 0.0;
  for (int i = 0; i < 1100; ++i) {
    s = 0.5 * (s0 + s1);
    if (s == s0 || s == s1) break;
    const double ratio0 = n0 / (s + r0);
    const double ratio1 = z1 / (s + 1.0);
    g = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
    if (g > 0.0) {
      s0 = s;
    } else if (g < 0.0) {
      s1 = s;
    } else {
      break;
    }
  }
  return s;
}

// Unsigned distance from (y0, y1), both >= 0, to the ellipse with e0 >= e1.
double ellipse_distance_quadrant(double e0, double e1, double y0, double y1) {
  if (y1 > 0.0) {
    if (y0 > 0.0) {
      const double z0 = y0 / e0;
      const double z1 = y1 / e1;
      const double g = z0 * z0 + z1 * z1 - 1.0;
      if (g == 0.0) return 0.0;
      const double r0 = (e0 / e1) * (e0 / e1);
      const double sbar = ellipse_root(r0, z0, z1, g);
      const double x0 = r0 * y0 / (sbar + r0);
      const double x1 = y1 / (sbar + 1.0);
      return std::hypot(x0 - y0, x1 - y1);
    }
    return std::abs(y1 - e1);
  }
  const double numer0 = e0 * y0;
  const double denom0 = e0 * e0 - e1 * e1;
  if (numer0 < denom0) {
    const double xde0 = numer0 / denom0;
    const double x0 = e0 * xde0;
    const double x1 = e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0));
    return std::hypot(x0 - y0, x1);
  }
  return std::abs(y0 - e0);
}

void require_unit(const Vec3& v, const char* name) {
  if (!is_unit(v)) {
    throw Error(ErrorCode::NonUnitVector,
                std::string(name) + " has length " + std::to_string(v.norm()));
  }
}

json plane_json(const Plane& p) {
  return {{"point", json_util::to_json(p.point)}, {"normal", json_util::to_json(p.normal)}};
}

Plane read_plane(const json& j, const Plane& fallback, const std::string& ctx) {
  Plane p = fallback;
  if (!j.is_object()) throw Error(ErrorCode::ValidationError, ctx + " must be an object");
  if (j.contains("point")) p.point = json_util::get_vec3(j["point"], ctx + ".point");
  if (j.contains("normal")) p.normal = json_util::get_vec3(j["normal"], ctx + ".normal");
  return p;
}

}  // namespace

std::string_view to_string(ExitDirection dir) {
  return dir == ExitDirection::AnteroCranial ? "AnteroCranial" : "PosteroCaudal";
}

AnatomyModel default_anatomy() {
  AnatomyModel m;
  m.antero_cranial_dir = default_antero_cranial(m.corridor.axis);
  m.postero_caudal_dir = -m.antero_cranial_dir;
  m.skin_plane = {m.corridor.center - 100.0 * m.corridor.axis, -m.corridor.axis};
  m.sufficiency_plane = sufficiency_default(m.corridor);
  m.far_cortex_plane = far_cortex_default(m.corridor);
  return m;
}

void validate(const AnatomyModel& m) {
  const CorridorSpec& c = m.corridor;
  require_unit(c.axis, "corridor.axis");
  require_unit(c.major_dir, "corridor.major_dir");
  if (std::abs(c.axis.dot(c.major_dir)) > kUnitTol) {
    throw Error(ErrorCode::ValidationError, "corridor.major_dir must be perpendicular to axis");
  }
  if (!(c.semi_axis_short > 0.0) || !(c.semi_axis_short <= c.semi_axis_long)) {
    throw Error(ErrorCode::ValidationError, "need 0 < semi_axis_short <= semi_axis_long");
  }
  if (!(c.half_length > c.semi_axis_long)) {
    throw Error(ErrorCode::ValidationError, "half_length must exceed semi_axis_long");
  }
  require_unit(m.skin_plane.normal, "skin_plane.normal");
  require_unit(m.antero_cranial_dir, "antero_cranial_dir");
  require_unit(m.postero_caudal_dir, "postero_caudal_dir");
  require_unit(m.sufficiency_plane.normal, "sufficiency_plane.normal");
  require_unit(m.far_cortex_plane.normal, "far_cortex_plane.normal");
  if (std::abs(m.antero_cranial_dir.dot(c.axis)) > 1e-6) {
    throw Error(ErrorCode::ValidationError, "antero_cranial_dir must be perpendicular to corridor.axis");
  }
  if (!(m.wire_radius_allowance >= 0.0)) {
    throw Error(ErrorCode::ValidationError, "wire_radius_allowance must be >= 0");
  }
  // Order of the three planes along the corridor axis line.
  const double t_skin = line_plane_param(c.center, c.axis, m.skin_plane);
  const double t_suff = line_plane_param(c.center, c.axis, m.sufficiency_plane);
  const double t_far = line_plane_param(c.center, c.axis, m.far_cortex_plane);
  if (!(t_skin < t_suff && t_suff < t_far)) {
    throw Error(ErrorCode::ValidationError,
                "sufficiency_plane must lie strictly between skin_plane and far_cortex_plane along the corridor axis");
  }
  if (!(m.skin_plane.normal.dot(c.axis) < 0.0)) {
    throw Error(ErrorCode::ValidationError, "skin_plane.normal must point away from the corridor (outwards)");
  }
}

AnatomyModel load_anatomy(const json& doc) {
  json_util::check_version(doc, kAnatomyFormatVersion, "anatomy");
  AnatomyModel m;
  CorridorSpec& c = m.corridor;
  if (doc.contains("corridor")) {
    const json& cj = doc["corridor"];
    if (!cj.is_object()) throw Error(ErrorCode::ValidationError, "anatomy.corridor must be an object");
    if (cj.contains("center")) c.center = json_util::get_vec3(cj["center"], "corridor.center");
    if (cj.contains("axis")) c.axis = json_util::get_vec3(cj["axis"], "corridor.axis");
    if (cj.contains("half_length")) c.half_length = json_util::get_number(cj["half_length"], "corridor.half_length");
    if (cj.contains("semi_axis_long"))
      c.semi_axis_long = json_util::get_number(cj["semi_axis_long"], "corridor.semi_axis_long");
    if (cj.contains("semi_axis_short"))
      c.semi_axis_short = json_util::get_number(cj["semi_axis_short"], "corridor.semi_axis_short");
    require_unit(c.axis, "corridor.axis");
    if (cj.contains("major_dir")) {
      c.major_dir = json_util::get_vec3(cj["major_dir"], "corridor.major_dir");
    } else {
      c.major_dir = default_antero_cranial(c.axis);
    }
  }
  m.antero_cranial_dir = doc.contains("antero_cranial_dir")
                             ? json_util::get_vec3(doc["antero_cranial_dir"], "antero_cranial_dir")
                             : default_antero_cranial(c.axis);
  m.postero_caudal_dir = doc.contains("postero_caudal_dir")
                             ? json_util::get_vec3(doc["postero_caudal_dir"], "postero_caudal_dir")
                             : Vec3(-m.antero_cranial_dir);
  const Plane skin_default{c.center - 100.0 * c.axis, -c.axis};
  m.skin_plane = doc.contains("skin_plane") ? read_plane(doc["skin_plane"], skin_default, "skin_plane")
                                            : skin_default;
  m.sufficiency_plane = doc.contains("sufficiency_plane")
                            ? read_plane(doc["sufficiency_plane"], sufficiency_default(c), "sufficiency_plane")
                            : sufficiency_default(c);
  m.far_cortex_plane = doc.contains("far_cortex_plane")
                           ? read_plane(doc["far_cortex_plane"], far_cortex_default(c), "far_cortex_plane")
                           : far_cortex_default(c);
  if (doc.contains("wire_radius_allowance")) {
    m.wire_radius_allowance = json_util::get_number(doc["wire_radius_allowance"], "wire_radius_allowance");
  }
  validate(m);
  return m;
}

AnatomyModel load_anatomy_text(std::string_view text) { return load_anatomy(json_util::parse(text, "anatomy")); }

json anatomy_to_json(const AnatomyModel& m) {
  const CorridorSpec& c = m.corridor;
  return {
      {"format_version", kAnatomyFormatVersion},
      {"corridor",
       {{"center", json_util::to_json(c.center)},
        {"axis", json_util::to_json(c.axis)},
        {"half_length", c.half_length},
        {"semi_axis_long", c.semi_axis_long},
        {"semi_axis_short", c.semi_axis_short},
        {"major_dir", json_util::to_json(c.major_dir)}}},
      {"skin_plane", plane_json(m.skin_plane)},
      {"antero_cranial_dir", json_util::to_json(m.antero_cranial_dir)},
      {"postero_caudal_dir", json_util::to_json(m.postero_caudal_dir)},
      {"sufficiency_plane", plane_json(m.sufficiency_plane)},
      {"far_cortex_plane", plane_json(m.far_cortex_plane)},
      {"wire_radius_allowance", m.wire_radius_allowance},
  };
}

double ellipse_signed_distance(double a, double b, const Vec2& q) {
  const double y0 = std::abs(q.x());
  const double y1 = std::abs(q.y());
  double dist = 0.0;
  if (a >= b) {
    dist = ellipse_distance_quadrant(a, b, y0, y1);
  } else {
    dist = ellipse_distance_quadrant(b, a, y1, y0);
  }
  const double level = (y0 / a) * (y0 / a) + (y1 / b) * (y1 / b);
  return level < 1.0 ? -dist : dist;
}

Vec3 corridor_coords(const AnatomyModel& m, const Vec3& p) {
  const CorridorSpec& c = m.corridor;
  const Vec3 r = p - c.center;
  return {r.dot(c.axis), r.dot(c.major_dir), r.dot(c.minor_dir())};
}

double radial_signed_distance(const AnatomyModel& m, const Vec3& p) {
  const Vec3 q = corridor_coords(m, p);
  return ellipse_signed_distance(m.corridor.semi_axis_long, m.corridor.semi_axis_short, {q.y(), q.z()});
}

double bone_signed_distance(const AnatomyModel& m, const Vec3& p) {
  // Extrusion of a 2D SDF: combine the cross-section and cap distances.
  const Vec3 q = corridor_coords(m, p);
  const double radial =
      ellipse_signed_distance(m.corridor.semi_axis_long, m.corridor.semi_axis_short, {q.y(), q.z()});
  const double axial = std::abs(q.x()) - m.corridor.half_length;
  const double outside = std::hypot(std::max(radial, 0.0), std::max(axial, 0.0));
  return std::min(std::max(radial, axial), 0.0) + outside;
}

ExitDirection exit_side(const AnatomyModel& m, const Vec3& p) {
  return (p - m.corridor.center).dot(m.antero_cranial_dir) >= 0.0 ? ExitDirection::AnteroCranial
                                                                   : ExitDirection::PosteroCaudal;
}

ExitDirection classify_exit_direction(const AnatomyModel& m, const Vec3& p) {
  if (!(bone_signed_distance(m, p) > 0.0)) {
    throw Error(ErrorCode::NotAnExitPoint, "point is not outside bone");
  }
  return exit_side(m, p);
}

Vec3 project_to_skin(const AnatomyModel& m, const Vec3& p) {
  return p - m.skin_plane.signed_distance(p) * m.skin_plane.normal;
}

std::pair<Vec3, Vec3> skin_tangents(const AnatomyModel& m) {
  const Vec3& n = m.skin_plane.normal;
  Vec3 u = reject(Vec3::UnitY(), n);
  if (u.norm() < 1e-9) u = reject(Vec3::UnitX(), n);
  u.normalize();
  return {u, u.cross(n)};
}

Vec3 skin_landmark(const AnatomyModel& m) {
  const double t = line_plane_param(m.corridor.center, m.corridor.axis, m.skin_plane);
  return m.corridor.center + t * m.corridor.axis;
}

AnatomyModel transformed(const AnatomyModel& m, const RigidTransform& xf) {
  AnatomyModel out = m;
  const auto& rot = xf.linear();
  out.corridor.center = xf * m.corridor.center;
  out.corridor.axis = rot * m.corridor.axis;
  out.corridor.major_dir = rot * m.corridor.major_dir;
  out.skin_plane = iliosim::transformed(m.skin_plane, xf);
  out.antero_cranial_dir = rot * m.antero_cranial_dir;
  out.postero_caudal_dir = rot * m.postero_caudal_dir;
  out.sufficiency_plane = iliosim::transformed(m.sufficiency_plane, xf);
  out.far_cortex_plane = iliosim::transformed(m.far_cortex_plane, xf);
  return out;
}

}  // namespace iliosim::anatomy
