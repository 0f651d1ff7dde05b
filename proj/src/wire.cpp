#include "iliosim/wire.hpp"

#include <cmath>

#include "iliosim/error.hpp"

namespace iliosim {

WirePose initial_pose(const anatomy::AnatomyModel& model) {
  WirePose pose;
  pose.entry = anatomy::skin_landmark(model);
  pose.direction = model.corridor.axis;
  return pose;
}

void validate_pose(const anatomy::AnatomyModel& model, const WirePose& pose) {
  if (std::abs(model.skin_plane.signed_distance(pose.entry)) > kGeomTol) {
    throw Error(ErrorCode::ValidationError, "wire entry is not on the skin plane");
  }
  if (!is_unit(pose.direction)) {
    throw Error(ErrorCode::NonUnitVector, "wire direction must be a unit vector");
  }
  if (!(pose.direction.dot(-model.skin_plane.normal) > 0.0)) {
    throw Error(ErrorCode::ValidationError, "wire direction must point into the body");
  }
  if (!(pose.wire_length > 0.0) || !(pose.wire_diameter > 0.0)) {
    throw Error(ErrorCode::ValidationError, "wire dimensions must be positive");
  }
  if (!(pose.depth >= 0.0 && pose.depth <= pose.wire_length)) {
    throw Error(ErrorCode::ValidationError, "wire depth out of range");
  }
}

WirePose transformed(const WirePose& pose, const RigidTransform& xf) {
  WirePose out = pose;
  out.entry = xf * pose.entry;
  out.direction = xf.linear() * pose.direction;
  return out;
}

}  // namespace iliosim
