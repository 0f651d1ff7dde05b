#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace iliosim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kGeomTol = 1e-6;  // mm
inline constexpr double kUnitTol = 1e-9;

struct Plane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();

  double signed_distance(const Vec3& p) const { return (p - point).dot(normal); }
};

inline bool is_unit(const Vec3& v, double tol = kUnitTol) { return std::abs(v.norm() - 1.0) <= tol; }

// Component of v orthogonal to unit vector n.
inline Vec3 reject(const Vec3& v, const Vec3& n) { return v - v.dot(n) * n; }

// Parameter t at which the line origin + t*dir meets the plane, or NaN if parallel.
inline double line_plane_param(const Vec3& origin, const Vec3& dir, const Plane& plane) {
  const double denom = dir.dot(plane.normal);
  if (std::abs(denom) < 1e-15) return std::numeric_limits<double>::quiet_NaN();
  return (plane.point - origin).dot(plane.normal) / denom;
}

using RigidTransform = Eigen::Isometry3d;

inline Plane transformed(const Plane& plane, const RigidTransform& xf) {
  return {xf * plane.point, xf.linear() * plane.normal};
}

}  // namespace iliosim
