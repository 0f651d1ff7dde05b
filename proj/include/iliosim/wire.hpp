#pragma once

#include "iliosim/anatomy.hpp"
#include "iliosim/geometry.hpp"

namespace iliosim {

/// Guide-wire kinematics: a straight wire entering at `entry` on the skin and
/// advanced `depth` mm along `direction`. Defaults: 2.5 mm x 300 mm wire.
struct WirePose {
  Vec3 entry = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  double depth = 0.0;
  double wire_length = 300.0;
  double wire_diameter = 2.5;

  Vec3 tip() const { return entry + depth * direction; }
  Vec3 at(double s) const { return entry + s * direction; }

  bool operator==(const WirePose&) const = default;
};

/// Wire outside the body, aimed down the corridor axis from the skin landmark.
WirePose initial_pose(const anatomy::AnatomyModel& model);

/// Throws ValidationError / NonUnitVector when the pose is not valid for `model`.
void validate_pose(const anatomy::AnatomyModel& model, const WirePose& pose);

WirePose transformed(const WirePose& pose, const RigidTransform& xf);

}  // namespace iliosim
