#include "iliosim/session.hpp"

#include <cmath>
#include <string>

#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::session {

using json_util::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr int kScriptFormatVersion = 1;

void require_positioning(const SessionState& state, std::string_view what) {
  if (state.phase != Phase::Positioning) {
    throw Error(ErrorCode::IllegalInPhase,
                std::string(what) + " is only allowed while the wire is outside the body");
  }
}

assess::AttemptRecord make_attempt(const anatomy::AnatomyModel& model, const SessionState& state, bool is_final) {
  const auto wc = assess::classify_wire(model, state.pose);
  assess::AttemptRecord rec;
  rec.index = static_cast<int>(state.attempts.size()) + 1;
  rec.max_depth = state.pose.depth;
  rec.label = wc.label;
  rec.exit = wc.exit;
  rec.is_final = is_final;
  return rec;
}

}  // namespace

std::string_view command_name(const Command& command) {
  return std::visit(overloaded{
                        [](const cmd::Place&) { return std::string_view("Place"); },
                        [](const cmd::Orientate&) { return std::string_view("Orientate"); },
                        [](const cmd::PushIn&) { return std::string_view("PushIn"); },
                        [](const cmd::Return&) { return std::string_view("Return"); },
                        [](const cmd::XRay&) { return std::string_view("XRay"); },
                        [](const cmd::Previous&) { return std::string_view("Previous"); },
                        [](const cmd::Following&) { return std::string_view("Following"); },
                        [](const cmd::Confirm&) { return std::string_view("Confirm"); },
                    },
                    command);
}

json command_to_json(const Command& command) {
  json j = {{"type", command_name(command)}};
  std::visit(overloaded{
                 [&j](const cmd::Place& c) { j["delta"] = json_util::to_json(c.delta); },
                 [&j](const cmd::Orientate& c) { j["direction"] = json_util::to_json(c.direction); },
                 [&j](const cmd::PushIn& c) { j["advance"] = c.advance; },
                 [&j](const cmd::XRay& c) { j["view"] = fluoro::to_string(c.view); },
                 [](const auto&) {},
             },
             command);
  return j;
}

Command command_from_json(const json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
      throw Error(ErrorCode::InvalidCommand, "command needs a string 'type'");
    }
    const std::string type = doc["type"].get<std::string>();
    if (type == "Place") return cmd::Place{json_util::get_vec2(json_util::require(doc, "delta", "Place"), "delta")};
    if (type == "Orientate") {
      return cmd::Orientate{json_util::get_vec3(json_util::require(doc, "direction", "Orientate"), "direction")};
    }
    if (type == "PushIn") {
      return cmd::PushIn{json_util::get_number(json_util::require(doc, "advance", "PushIn"), "advance")};
    }
    if (type == "Return") return cmd::Return{};
    if (type == "XRay") {
      const json& v = json_util::require(doc, "view", "XRay");
      if (!v.is_string()) throw Error(ErrorCode::InvalidCommand, "XRay.view must be a string");
      return cmd::XRay{fluoro::view_from_string(v.get<std::string>())};
    }
    if (type == "Previous") return cmd::Previous{};
    if (type == "Following") return cmd::Following{};
    if (type == "Confirm") return cmd::Confirm{};
    throw Error(ErrorCode::InvalidCommand, "unknown command type '" + type + "'");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidCommand) throw;
    throw Error(ErrorCode::InvalidCommand, e.what());
  }
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Positioning: return "Positioning";
    case Phase::Inserted: return "Inserted";
    case Phase::Confirmed: return "Confirmed";
  }
  return "Positioning";
}

SessionState initial_state(const anatomy::AnatomyModel& model) {
  SessionState state;
  state.pose = initial_pose(model);
  return state;
}

SessionState apply_command(const SessionState& state, const anatomy::AnatomyModel& model,
                           const fluoro::ViewSpecs& views, const Command& command, double now) {
  if (state.phase == Phase::Confirmed) {
    throw Error(ErrorCode::IllegalInPhase, "session is confirmed; no further commands are accepted");
  }
  SessionState next = state;
  std::optional<int> radiograph_ref;

  std::visit(overloaded{
                 [&](const cmd::Place& c) {
                   require_positioning(state, "PLACE");
                   if (!c.delta.allFinite()) throw Error(ErrorCode::InvalidCommand, "PLACE delta must be finite");
                   const auto [u, v] = anatomy::skin_tangents(model);
                   next.pose.entry = anatomy::project_to_skin(model, state.pose.entry + c.delta.x() * u +
                                                                         c.delta.y() * v);
                 },
                 [&](const cmd::Orientate& c) {
                   require_positioning(state, "ORIENTATE");
                   if (!c.direction.allFinite() || !is_unit(c.direction)) {
                     throw Error(ErrorCode::InvalidCommand, "ORIENTATE direction must be a unit vector");
                   }
                   if (!(c.direction.dot(-model.skin_plane.normal) > 0.0)) {
                     throw Error(ErrorCode::InvalidCommand, "ORIENTATE direction must point into the body");
                   }
                   next.pose.direction = c.direction;
                 },
                 [&](const cmd::PushIn& c) {
                   if (!std::isfinite(c.advance) || !(c.advance > 0.0)) {
                     throw Error(ErrorCode::InvalidCommand, "PUSH IN advance must be positive");
                   }
                   next.pose.depth = std::min(state.pose.depth + c.advance, state.pose.wire_length);
                   next.phase = Phase::Inserted;
                 },
                 [&](const cmd::Return&) {
                   if (state.phase == Phase::Inserted && assess::classify_wire(model, state.pose).reached_bone) {
                     next.attempts.push_back(make_attempt(model, state, false));
                   }
                   next.pose.depth = 0.0;
                   next.phase = Phase::Positioning;
                 },
                 [&](const cmd::XRay& c) {
                   const int seq = state.xray_count + 1;
                   next.radiographs.push_back(
                       fluoro::render_radiograph(fluoro::view(views, c.view), model, state.pose, seq, now));
                   next.xray_count = seq;
                   next.image_cursor = static_cast<int>(next.radiographs.size()) - 1;
                   radiograph_ref = seq;
                 },
                 [&](const cmd::Previous&) {
                   if (state.image_cursor <= 0) throw Error(ErrorCode::CursorOutOfRange, "already at the oldest image");
                   next.image_cursor = state.image_cursor - 1;
                 },
                 [&](const cmd::Following&) {
                   if (state.image_cursor + 1 >= static_cast<int>(state.radiographs.size())) {
                     throw Error(ErrorCode::CursorOutOfRange, "already at the newest image");
                   }
                   next.image_cursor = state.image_cursor + 1;
                 },
                 [&](const cmd::Confirm&) {
                   next.attempts.push_back(make_attempt(model, state, true));
                   next.phase = Phase::Confirmed;
                 },
             },
             command);

  next.events.push_back(SessionEvent{static_cast<int>(state.events.size()) + 1, now, command, next.pose,
                                     radiograph_ref});
  return next;
}

VisibleImages visible_images(const SessionState& state) {
  VisibleImages out;
  const int cursor = state.image_cursor;
  if (cursor >= 0 && cursor < static_cast<int>(state.radiographs.size())) {
    out.current = state.radiographs[static_cast<std::size_t>(cursor)];
    if (cursor >= 1) out.previous = state.radiographs[static_cast<std::size_t>(cursor - 1)];
  }
  return out;
}

SessionState replay(const anatomy::AnatomyModel& model, const fluoro::ViewSpecs& views,
                    std::span<const Command> script) {
  SessionState state = initial_state(model);
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      state = apply_command(state, model, views, script[i], static_cast<double>(i));
    } catch (const Error& e) {
      throw ScriptError(i, e);
    }
  }
  return state;
}

SessionState replay_timed(const anatomy::AnatomyModel& model, const fluoro::ViewSpecs& views,
                          std::span<const std::pair<Command, double>> script) {
  SessionState state = initial_state(model);
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      state = apply_command(state, model, views, script[i].first, script[i].second);
    } catch (const Error& e) {
      throw ScriptError(i, e);
    }
  }
  return state;
}

std::vector<Command> script_from_json(const json& doc) {
  json_util::check_version(doc, kScriptFormatVersion, "script");
  const json& list = json_util::require(doc, "commands", "script");
  if (!list.is_array()) throw Error(ErrorCode::ValidationError, "script.commands must be an array");
  std::vector<Command> out;
  out.reserve(list.size());
  for (const auto& c : list) out.push_back(command_from_json(c));
  return out;
}

int trial_count(const SessionState& state) {
  int n = 0;
  for (const auto& a : state.attempts) n += a.is_final ? 0 : 1;
  return n;
}

}  // namespace iliosim::session
