#pragma once

#include <string_view>

#include <nlohmann/json.hpp>

#include "iliosim/geometry.hpp"

namespace iliosim::anatomy {

inline constexpr int kAnatomyFormatVersion = 1;

/// Safe intra-osseous corridor of the sacral wing: an elliptic cylinder
/// around `axis`, truncated at +-half_length from `center`.
///
/// Semi-axes default to half the average narrow-section diameters of the
/// sacral wing corridor (22 mm by 11 mm).
struct CorridorSpec {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();  // lateral to medial
  double half_length = 35.0;
  double semi_axis_long = 11.0;
  double semi_axis_short = 5.5;
  Vec3 major_dir = Vec3(0.0, 1.0, 1.0).normalized();

  Vec3 minor_dir() const { return axis.cross(major_dir); }
};

/// Posterior pelvis, one side. Immutable once loaded; every query is pure.
struct AnatomyModel {
  CorridorSpec corridor;
  Plane skin_plane;  // normal points out of the body
  Vec3 antero_cranial_dir;
  Vec3 postero_caudal_dir;
  Plane sufficiency_plane;
  Plane far_cortex_plane;
  double wire_radius_allowance = 1.25;
};

enum class ExitDirection { AnteroCranial, PosteroCaudal };

std::string_view to_string(ExitDirection dir);

/// Model built entirely from defaults (pelvis frame: +x lateral-to-medial,
/// +y anterior, +z cranial).
AnatomyModel default_anatomy();

/// Parses and validates an anatomy config document. Absent fields take
/// their defaults; `format_version` is required.
AnatomyModel load_anatomy(const nlohmann::json& doc);
AnatomyModel load_anatomy_text(std::string_view text);

/// Full config document for `model`; load_anatomy(anatomy_to_json(m)) == m.
nlohmann::json anatomy_to_json(const AnatomyModel& model);

/// Throws ValidationError / NonUnitVector when an invariant does not hold.
void validate(const AnatomyModel& model);

/// Signed distance from a 2D point to the ellipse x^2/a^2 + y^2/b^2 = 1,
/// negative inside. Exact to rounding; a >= b > 0.
double ellipse_signed_distance(double a, double b, const Vec2& q);

/// Coordinates of p in the corridor frame: (longitudinal, major, minor).
Vec3 corridor_coords(const AnatomyModel& model, const Vec3& p);

/// Signed distance to the corridor cross-section boundary, ignoring the end
/// caps. Negative inside the elliptic cylinder.
double radial_signed_distance(const AnatomyModel& model, const Vec3& p);

/// Exact signed distance to the truncated elliptic cylinder (mm, negative
/// inside bone).
double bone_signed_distance(const AnatomyModel& model, const Vec3& p);

/// Side of the corridor a point lies on: sign of (p - center) . antero_cranial_dir,
/// with zero going to AnteroCranial. No interior check.
ExitDirection exit_side(const AnatomyModel& model, const Vec3& p);

/// As exit_side, but throws NotAnExitPoint unless p is outside bone.
ExitDirection classify_exit_direction(const AnatomyModel& model, const Vec3& p);

/// Foot of the perpendicular from p onto the skin plane.
Vec3 project_to_skin(const AnatomyModel& model, const Vec3& p);

/// Orthonormal tangent basis (anterior-ish, cranial-ish) of the skin plane.
std::pair<Vec3, Vec3> skin_tangents(const AnatomyModel& model);

/// Where the corridor axis meets the skin: the entry landmark.
Vec3 skin_landmark(const AnatomyModel& model);

AnatomyModel transformed(const AnatomyModel& model, const RigidTransform& xf);

}  // namespace iliosim::anatomy
