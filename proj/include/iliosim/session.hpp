#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "iliosim/anatomy.hpp"
#include "iliosim/assess.hpp"
#include "iliosim/fluoro.hpp"
#include "iliosim/wire.hpp"

namespace iliosim::session {

namespace cmd {
struct Place {
  Vec2 delta = Vec2::Zero();  // (anterior, cranial) translation on the skin, mm
  bool operator==(const Place&) const = default;
};
struct Orientate {
  Vec3 direction = Vec3::UnitX();
  bool operator==(const Orientate&) const = default;
};
struct PushIn {
  double advance = 0.0;
  bool operator==(const PushIn&) const = default;
};
struct Return {
  bool operator==(const Return&) const = default;
};
struct XRay {
  fluoro::ViewName view = fluoro::ViewName::AP;
  bool operator==(const XRay&) const = default;
};
struct Previous {
  bool operator==(const Previous&) const = default;
};
struct Following {
  bool operator==(const Following&) const = default;
};
struct Confirm {
  bool operator==(const Confirm&) const = default;
};
}  // namespace cmd

using Command = std::variant<cmd::Place, cmd::Orientate, cmd::PushIn, cmd::Return, cmd::XRay, cmd::Previous,
                             cmd::Following, cmd::Confirm>;

std::string_view command_name(const Command& command);
nlohmann::json command_to_json(const Command& command);
Command command_from_json(const nlohmann::json& doc);

enum class Phase { Positioning, Inserted, Confirmed };

std::string_view to_string(Phase phase);

struct SessionEvent {
  int seq = 0;
  double wall_time = 0.0;  // seconds
  Command command;
  WirePose pose_after;
  std::optional<int> radiograph_ref;

  bool operator==(const SessionEvent&) const = default;
};

/// Event-sourced exercise state. Positioning <=> depth 0 until confirmed;
/// Confirmed is terminal.
struct SessionState {
  Phase phase = Phase::Positioning;
  WirePose pose;
  std::vector<SessionEvent> events;
  std::vector<fluoro::Radiograph> radiographs;
  int image_cursor = -1;  // -1 while no image has been taken
  std::vector<assess::AttemptRecord> attempts;
  int xray_count = 0;

  bool operator==(const SessionState&) const = default;
};

SessionState initial_state(const anatomy::AnatomyModel& model);

/// Applies one trainee command and returns the successor state. The input
/// is never modified; on error nothing is appended anywhere.
SessionState apply_command(const SessionState& state, const anatomy::AnatomyModel& model,
                           const fluoro::ViewSpecs& views, const Command& command, double now);

struct VisibleImages {
  std::optional<fluoro::Radiograph> current;
  std::optional<fluoro::Radiograph> previous;
};

/// The pair of images on screen: the one under the cursor and its predecessor.
VisibleImages visible_images(const SessionState& state);

/// Headless run of a script. Command i is stamped with the synthetic time
/// i seconds. Throws ScriptError carrying the index of the first rejected command.
SessionState replay(const anatomy::AnatomyModel& model, const fluoro::ViewSpecs& views,
                    std::span<const Command> script);

/// Re-applies (command, wall_time) pairs, e.g. a stored event list.
SessionState replay_timed(const anatomy::AnatomyModel& model, const fluoro::ViewSpecs& views,
                          std::span<const std::pair<Command, double>> script);

/// Reads `{"format_version": 1, "commands": [...]}`.
std::vector<Command> script_from_json(const nlohmann::json& doc);

int trial_count(const SessionState& state);

}  // namespace iliosim::session
