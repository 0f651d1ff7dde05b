#include "iliosim/metrics.hpp"

#include <vector>

#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::assess {

SessionMetrics session_metrics(const session::SessionState& state, const anatomy::AnatomyModel& model) {
  if (state.phase != session::Phase::Confirmed) {
    throw Error(ErrorCode::NotConfirmed, "session has not been confirmed");
  }
  std::vector<OsseousLabel> trials;
  OsseousLabel final_label = OsseousLabel::IntraOsseous;
  for (const auto& a : state.attempts) {
    if (a.is_final) {
      final_label = a.label;
    } else {
      trials.push_back(a.label);
    }
  }
  SessionMetrics m;
  m.xray_count = state.xray_count;
  m.trial_count = static_cast<int>(trials.size());
  m.iatrogenic_level = iatrogenic_level(trials, final_label);
  m.duration = state.events.back().wall_time - state.events.front().wall_time;
  m.final_assessment = assess_final(model, state.pose);
  return m;
}

nlohmann::json metrics_to_json(const SessionMetrics& m) {
  return {{"xray_count", m.xray_count},
          {"trial_count", m.trial_count},
          {"iatrogenic_level", m.iatrogenic_level},
          {"duration", m.duration},
          {"final_assessment", to_string(m.final_assessment)}};
}

SessionMetrics metrics_from_json(const nlohmann::json& doc) {
  auto field = [&doc](std::string_view key) -> const nlohmann::json& { return json_util::require(doc, key, "metrics"); };
  auto integer = [&field](std::string_view key) { return static_cast<int>(json_util::get_int(field(key), key)); };
  SessionMetrics m;
  m.xray_count = integer("xray_count");
  m.trial_count = integer("trial_count");
  m.iatrogenic_level = integer("iatrogenic_level");
  m.duration = json_util::get_number(field("duration"), "duration");
  m.final_assessment = assessment_from_string(json_util::get_string(field("final_assessment"), "final_assessment"));
  return m;
}

}  // namespace iliosim::assess
