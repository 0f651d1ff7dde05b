#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iliosim/anatomy.hpp"
#include "iliosim/fluoro.hpp"
#include "iliosim/metrics.hpp"
#include "iliosim/session.hpp"

namespace iliosim::service {

inline constexpr int kSessionFormatVersion = 1;

/// Persistent trace of one exercise. Metrics are present iff the session
/// is confirmed, and must equal what replaying `events` produces.
struct SessionDocument {
  nlohmann::json anatomy;  // full anatomy config, inline
  fluoro::ViewParams views;
  std::vector<session::SessionEvent> events;
  std::optional<assess::SessionMetrics> metrics;

  bool operator==(const SessionDocument&) const = default;
};

/// A document brought back to life: model, views and the replayed state.
struct LiveSession {
  anatomy::AnatomyModel model;
  fluoro::ViewSpecs views;
  session::SessionState state;
};

SessionDocument make_document(const anatomy::AnatomyModel& model, const fluoro::ViewParams& views,
                              const session::SessionState& state);

nlohmann::json document_to_json(const SessionDocument& doc);

/// Throws VersionMismatch for another format_version and CorruptDocument for
/// anything structurally wrong.
SessionDocument document_from_json(const nlohmann::json& doc);

std::string to_canonical(const SessionDocument& doc);
SessionDocument from_text(const std::string& text);

/// Replays the event list and checks every stored pose, image reference and
/// the metrics against the result. Throws CorruptDocument on any mismatch.
LiveSession rebuild(const SessionDocument& doc);

nlohmann::json pose_to_json(const WirePose& pose);
WirePose pose_from_json(const nlohmann::json& doc);
nlohmann::json event_to_json(const session::SessionEvent& event);
nlohmann::json attempt_to_json(const assess::AttemptRecord& attempt);

/// Compact state summary used by API responses.
nlohmann::json state_to_json(const session::SessionState& state);

/// Radiograph as JSON with coordinates rounded to six decimals.
nlohmann::json radiograph_json(const fluoro::Radiograph& image);

}  // namespace iliosim::service
