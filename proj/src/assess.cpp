#include "iliosim/assess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iliosim/error.hpp"

namespace iliosim::assess {

std::string_view to_string(OsseousLabel label) {
  return label == OsseousLabel::IntraOsseous ? "IntraOsseous" : "ExtraOsseous";
}

std::string_view to_string(TrajectoryAssessment a) {
  switch (a) {
    case TrajectoryAssessment::Success: return "Success";
    case TrajectoryAssessment::AnteroCranialPenetration: return "AnteroCranialPenetration";
    case TrajectoryAssessment::PosteroCaudalPenetration: return "PosteroCaudalPenetration";
    case TrajectoryAssessment::InadequateProgression: return "InadequateProgression";
    case TrajectoryAssessment::ExcessiveProgression: return "ExcessiveProgression";
  }
  return "Success";
}

TrajectoryAssessment assessment_from_string(std::string_view text) {
  for (auto a : {TrajectoryAssessment::Success, TrajectoryAssessment::AnteroCranialPenetration,
                 TrajectoryAssessment::PosteroCaudalPenetration, TrajectoryAssessment::InadequateProgression,
                 TrajectoryAssessment::ExcessiveProgression}) {
    if (to_string(a) == text) return a;
  }
  throw Error(ErrorCode::ValidationError, "unknown assessment '" + std::string(text) + "'");
}

std::string_view comment_for(TrajectoryAssessment a) {
  switch (a) {
    case TrajectoryAssessment::Success:
      return "Successful trajectory: intra-osseous aspect and sufficient depth";
    case TrajectoryAssessment::AnteroCranialPenetration:
      return "Unsatisfactory trajectory: antero cranial penetration";
    case TrajectoryAssessment::PosteroCaudalPenetration:
      return "Unsatisfactory trajectory: postero-caudal penetration";
    case TrajectoryAssessment::InadequateProgression:
      return "Unsatisfactory trajectory: inadequate wire progression";
    case TrajectoryAssessment::ExcessiveProgression:
      return "Unsatisfactory trajectory: excessive wire progression";
  }
  return "";
}

WireClassification classify_wire(const anatomy::AnatomyModel& model, const WirePose& pose, double max_step) {
  WireClassification out;
  if (!(pose.depth > 0.0)) return out;

  const auto& c = model.corridor;
  const auto samples = static_cast<long>(std::ceil(pose.depth / max_step));
  const double step = pose.depth / static_cast<double>(samples);
  for (long i = 0; i <= samples; ++i) {
    // Last sample is the tip exactly.
    const double s = i == samples ? pose.depth : step * static_cast<double>(i);
    const Vec3 p = pose.at(s);
    if ((p - c.center).dot(c.axis) < -c.half_length) continue;
    out.reached_bone = true;
    if (anatomy::radial_signed_distance(model, p) > -model.wire_radius_allowance) {
      out.label = OsseousLabel::ExtraOsseous;
      out.exit = anatomy::exit_side(model, p);
      return out;
    }
    if (!out.penetration) out.penetration = Interval{s, s};
    out.penetration->end = s;
  }
  return out;
}

TrajectoryAssessment assess_final(const anatomy::AnatomyModel& model, const WirePose& pose) {
  const WireClassification wc = classify_wire(model, pose);
  if (wc.label == OsseousLabel::ExtraOsseous) {
    return *wc.exit == ExitDirection::AnteroCranial ? TrajectoryAssessment::AnteroCranialPenetration
                                                    : TrajectoryAssessment::PosteroCaudalPenetration;
  }
  const Vec3 tip = pose.tip();
  if (model.far_cortex_plane.signed_distance(tip) > 0.0) return TrajectoryAssessment::ExcessiveProgression;
  if (model.sufficiency_plane.signed_distance(tip) < 0.0) return TrajectoryAssessment::InadequateProgression;
  return TrajectoryAssessment::Success;
}

int iatrogenic_level(std::span<const OsseousLabel> trials, OsseousLabel final_label) {
  const bool any_extra_trial =
      std::any_of(trials.begin(), trials.end(), [](OsseousLabel l) { return l == OsseousLabel::ExtraOsseous; });
  if (final_label == OsseousLabel::IntraOsseous) return any_extra_trial ? 2 : 1;
  if (trials.empty()) return 5;
  return any_extra_trial ? 4 : 3;
}

std::optional<std::string_view> lesson_for(TrajectoryAssessment a) {
  switch (a) {
    case TrajectoryAssessment::Success: return std::nullopt;
    case TrajectoryAssessment::AnteroCranialPenetration: return "lesson.antero-cranial";
    case TrajectoryAssessment::PosteroCaudalPenetration: return "lesson.postero-caudal";
    case TrajectoryAssessment::InadequateProgression: return "lesson.inadequate-progression";
    case TrajectoryAssessment::ExcessiveProgression: return "lesson.excessive-progression";
  }
  return std::nullopt;
}

}  // namespace iliosim::assess
