#pragma once

#include <nlohmann/json.hpp>

#include "iliosim/anatomy.hpp"
#include "iliosim/assess.hpp"
#include "iliosim/session.hpp"

namespace iliosim::assess {

/// Per-session scores shown at the end of an exercise.
struct SessionMetrics {
  int xray_count = 0;
  int trial_count = 0;
  int iatrogenic_level = 1;
  double duration = 0.0;  // seconds, first to last event
  TrajectoryAssessment final_assessment = TrajectoryAssessment::Success;

  bool operator==(const SessionMetrics&) const = default;
};

/// Throws NotConfirmed unless the session has been confirmed.
SessionMetrics session_metrics(const session::SessionState& state, const anatomy::AnatomyModel& model);

nlohmann::json metrics_to_json(const SessionMetrics& m);
SessionMetrics metrics_from_json(const nlohmann::json& doc);

}  // namespace iliosim::assess
