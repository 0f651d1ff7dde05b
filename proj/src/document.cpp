#include "iliosim/document.hpp"

#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::service {

using json_util::json;

json pose_to_json(const WirePose& pose) {
  return {{"entry", json_util::to_json(pose.entry)},
          {"direction", json_util::to_json(pose.direction)},
          {"depth", pose.depth},
          {"wire_length", pose.wire_length},
          {"wire_diameter", pose.wire_diameter}};
}

WirePose pose_from_json(const json& doc) {
  WirePose pose;
  pose.entry = json_util::get_vec3(json_util::require(doc, "entry", "pose"), "pose.entry");
  pose.direction = json_util::get_vec3(json_util::require(doc, "direction", "pose"), "pose.direction");
  pose.depth = json_util::get_number(json_util::require(doc, "depth", "pose"), "pose.depth");
  pose.wire_length = json_util::get_number(json_util::require(doc, "wire_length", "pose"), "pose.wire_length");
  pose.wire_diameter =
      json_util::get_number(json_util::require(doc, "wire_diameter", "pose"), "pose.wire_diameter");
  return pose;
}

json event_to_json(const session::SessionEvent& e) {
  return {{"seq", e.seq},
          {"wall_time", e.wall_time},
          {"command", session::command_to_json(e.command)},
          {"pose_after", pose_to_json(e.pose_after)},
          {"radiograph_ref", e.radiograph_ref ? json(*e.radiograph_ref) : json(nullptr)}};
}

json attempt_to_json(const assess::AttemptRecord& a) {
  return {{"index", a.index},
          {"max_depth", a.max_depth},
          {"label", assess::to_string(a.label)},
          {"exit", a.exit ? json(anatomy::to_string(*a.exit)) : json(nullptr)},
          {"is_final", a.is_final}};
}

SessionDocument make_document(const anatomy::AnatomyModel& model, const fluoro::ViewParams& views,
                              const session::SessionState& state) {
  SessionDocument doc;
  doc.anatomy = anatomy::anatomy_to_json(model);
  doc.views = views;
  doc.events = state.events;
  if (state.phase == session::Phase::Confirmed) doc.metrics = assess::session_metrics(state, model);
  return doc;
}

json document_to_json(const SessionDocument& doc) {
  json events = json::array();
  for (const auto& e : doc.events) events.push_back(event_to_json(e));
  return {{"format_version", kSessionFormatVersion},
          {"anatomy", doc.anatomy},
          {"views", fluoro::view_params_to_json(doc.views)},
          {"events", std::move(events)},
          {"metrics", doc.metrics ? assess::metrics_to_json(*doc.metrics) : json(nullptr)}};
}

SessionDocument document_from_json(const json& j) {
  try {
    json_util::check_version(j, kSessionFormatVersion, "session");
    SessionDocument doc;
    doc.anatomy = json_util::require(j, "anatomy", "session");
    doc.views = fluoro::view_params_from_json(json_util::require(j, "views", "session"));
    const json& events = json_util::require(j, "events", "session");
    if (!events.is_array()) throw Error(ErrorCode::CorruptDocument, "session.events must be an array");
    for (const auto& ej : events) {
      session::SessionEvent e;
      e.seq = json_util::require(ej, "seq", "event").get<int>();
      e.wall_time = json_util::get_number(json_util::require(ej, "wall_time", "event"), "wall_time");
      e.command = session::command_from_json(json_util::require(ej, "command", "event"));
      e.pose_after = pose_from_json(json_util::require(ej, "pose_after", "event"));
      const json& ref = json_util::require(ej, "radiograph_ref", "event");
      if (!ref.is_null()) e.radiograph_ref = ref.get<int>();
      doc.events.push_back(std::move(e));
    }
    const json& metrics = json_util::require(j, "metrics", "session");
    if (!metrics.is_null()) doc.metrics = assess::metrics_from_json(metrics);
    return doc;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptDocument || e.code() == ErrorCode::VersionMismatch) throw;
    throw Error(ErrorCode::CorruptDocument, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptDocument, e.what());
  }
}

std::string to_canonical(const SessionDocument& doc) { return json_util::canonical(document_to_json(doc)); }

SessionDocument from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::CorruptDocument, e.what());
  }
  return document_from_json(j);
}

LiveSession rebuild(const SessionDocument& doc) {
  try {
    LiveSession live{anatomy::load_anatomy(doc.anatomy), {}, {}};
    live.views = fluoro::standard_views(live.model, doc.views);
    std::vector<std::pair<session::Command, double>> script;
    script.reserve(doc.events.size());
    for (const auto& e : doc.events) script.emplace_back(e.command, e.wall_time);
    live.state = session::replay_timed(live.model, live.views, script);
    if (live.state.events != doc.events) {
      throw Error(ErrorCode::CorruptDocument, "stored events differ from their replay");
    }
    std::optional<assess::SessionMetrics> metrics;
    if (live.state.phase == session::Phase::Confirmed) metrics = assess::session_metrics(live.state, live.model);
    if (metrics != doc.metrics) throw Error(ErrorCode::CorruptDocument, "stored metrics differ from their replay");
    return live;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptDocument) throw;
    throw Error(ErrorCode::CorruptDocument, e.what());
  }
}

json state_to_json(const session::SessionState& state) {
  json attempts = json::array();
  for (const auto& a : state.attempts) attempts.push_back(attempt_to_json(a));
  return {{"phase", session::to_string(state.phase)},
          {"pose", pose_to_json(state.pose)},
          {"xray_count", state.xray_count},
          {"trial_count", session::trial_count(state)},
          {"image_cursor", state.image_cursor},
          {"image_count", state.radiographs.size()},
          {"event_count", state.events.size()},
          {"attempts", std::move(attempts)}};
}

json radiograph_json(const fluoro::Radiograph& image) { return json::parse(fluoro::radiograph_to_text(image)); }

}  // namespace iliosim::service
