#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "iliosim/anatomy.hpp"
#include "iliosim/wire.hpp"

namespace iliosim::assess {

using anatomy::ExitDirection;

enum class OsseousLabel { IntraOsseous, ExtraOsseous };

std::string_view to_string(OsseousLabel label);

/// One insertion episode, closed by RETURN (trial) or CONFIRM (final).
struct AttemptRecord {
  int index = 0;
  double max_depth = 0.0;
  OsseousLabel label = OsseousLabel::IntraOsseous;
  std::optional<ExitDirection> exit;  // set iff label is ExtraOsseous
  bool is_final = false;

  bool operator==(const AttemptRecord&) const = default;
};

enum class TrajectoryAssessment {
  Success,
  AnteroCranialPenetration,
  PosteroCaudalPenetration,
  InadequateProgression,
  ExcessiveProgression,
};

std::string_view to_string(TrajectoryAssessment a);
TrajectoryAssessment assessment_from_string(std::string_view text);

/// Trainee-facing comment for an assessment (stable API text).
std::string_view comment_for(TrajectoryAssessment a);

/// Arc-length interval along the wire (mm from the entry point).
struct Interval {
  double begin = 0.0;
  double end = 0.0;
};

struct WireClassification {
  OsseousLabel label = OsseousLabel::IntraOsseous;
  std::optional<ExitDirection> exit;
  std::optional<Interval> penetration;  // intra-bone portion of the wire
  bool reached_bone = false;            // tip went past the lateral cortex cap
};

/// Largest spacing between wire samples, mm.
inline constexpr double kWireSampleStep = 0.5;

/// Walks the wire axis from entry to tip. Once a sample has passed the
/// lateral cap it must keep at least wire_radius_allowance of clearance
/// from the corridor cross-section boundary; the first sample that does not
/// marks the wire extra-osseous and fixes the exit side.
WireClassification classify_wire(const anatomy::AnatomyModel& model, const WirePose& pose,
                                 double max_step = kWireSampleStep);

/// Penetration first, then excessive, then inadequate progression.
TrajectoryAssessment assess_final(const anatomy::AnatomyModel& model, const WirePose& pose);

/// Five-level iatrogenic index:
///   trials all intra (or none), final intra -> 1
///   some trial extra,           final intra -> 2
///   trials all intra,           final extra -> 3
///   some trial extra,           final extra -> 4
///   no trial,                   final extra -> 5
int iatrogenic_level(std::span<const OsseousLabel> trials, OsseousLabel final_label);

/// Lesson to open for a failed trajectory; none for Success.
std::optional<std::string_view> lesson_for(TrajectoryAssessment a);

}  // namespace iliosim::assess
