#include "iliosim/service.hpp"

#include <chrono>
#include <regex>

#include "iliosim/cohort.hpp"
#include "iliosim/error.hpp"
#include "iliosim/json_util.hpp"

namespace iliosim::service {

using json_util::json;

namespace {

double system_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

ApiResponse respond(int status, const json& body) { return {status, json_util::canonical(body)}; }

ApiResponse error_response(const Error& e) {
  return respond(status_for(e.code()), {{"error", e.name()}, {"message", e.what()}});
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  json j = json_util::parse(body, "request body");
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "request body must be a JSON object");
  return j;
}

json session_view(const std::string& id, const LiveSession& live) {
  const auto& state = live.state;
  const auto images = session::visible_images(state);
  json body = {{"id", id},
               {"state", state_to_json(state)},
               {"images",
                {{"current", images.current ? radiograph_json(*images.current) : json(nullptr)},
                 {"previous", images.previous ? radiograph_json(*images.previous) : json(nullptr)}}},
               {"counters", {{"xray_count", state.xray_count}, {"trial_count", session::trial_count(state)}}}};
  if (state.phase == session::Phase::Confirmed) {
    const auto metrics = assess::session_metrics(state, live.model);
    const auto lesson = assess::lesson_for(metrics.final_assessment);
    body["assessment"] = assess::to_string(metrics.final_assessment);
    body["comment"] = assess::comment_for(metrics.final_assessment);
    body["lesson_id"] = lesson ? json(*lesson) : json(nullptr);
    body["metrics"] = assess::metrics_to_json(metrics);
  }
  return body;
}

}  // namespace

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::IllegalInPhase:
    case ErrorCode::CursorOutOfRange:
    case ErrorCode::NotConfirmed: return 409;
    case ErrorCode::CorruptDocument: return 500;
    default: return 400;
  }
}

Service::Service(std::filesystem::path store_dir, Clock clock)
    : store_(std::move(store_dir)), clock_(clock ? std::move(clock) : Clock(system_seconds)) {}

std::shared_ptr<Service::Lane> Service::lane(const std::string& id) {
  std::lock_guard lock(lanes_mutex_);
  auto& slot = lanes_[id];
  if (!slot) slot = std::make_shared<Lane>();
  return slot;
}

ApiResponse Service::handle(const ApiRequest& req) {
  static const std::regex kSession(R"(^/sessions/([A-Za-z0-9_-]+)$)");
  static const std::regex kAction(R"(^/sessions/([A-Za-z0-9_-]+)/(commands|confirm|report)$)");
  try {
    std::smatch m;
    if (req.path == "/sessions") {
      if (req.method != "POST") return respond(405, {{"error", "MethodNotAllowed"}});
      return create_session(req.body);
    }
    if (req.path == "/cohort/analyze") {
      if (req.method != "POST") return respond(405, {{"error", "MethodNotAllowed"}});
      return analyze(req.body);
    }
    if (std::regex_match(req.path, m, kSession)) {
      if (req.method != "GET") return respond(405, {{"error", "MethodNotAllowed"}});
      return get_session(m[1]);
    }
    if (std::regex_match(req.path, m, kAction)) {
      const std::string id = m[1];
      const std::string action = m[2];
      if (action == "report") {
        if (req.method != "GET") return respond(405, {{"error", "MethodNotAllowed"}});
        return report(id);
      }
      if (req.method != "POST") return respond(405, {{"error", "MethodNotAllowed"}});
      if (action == "confirm") return submit(id, session::cmd::Confirm{});
      const json body = parse_body(req.body);
      return submit(id, session::command_from_json(json_util::require(body, "command", "request")));
    }
    return respond(404, {{"error", "NotFound"}, {"message", "no route for " + req.method + " " + req.path}});
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return respond(400, {{"error", "ParseError"}, {"message", e.what()}});
  }
}

ApiResponse Service::create_session(const std::string& body) {
  const json j = parse_body(body);
  json anatomy_doc = j.contains("anatomy") ? j["anatomy"] : json{{"format_version", anatomy::kAnatomyFormatVersion}};
  LiveSession live{anatomy::load_anatomy(anatomy_doc), {}, {}};
  const fluoro::ViewParams params = fluoro::view_params_from_json(j.contains("views") ? j["views"] : json(nullptr));
  live.views = fluoro::standard_views(live.model, params);
  live.state = session::initial_state(live.model);
  const std::string id = store_.save(make_document(live.model, params, live.state));
  auto l = lane(id);
  std::lock_guard lock(l->mutex);
  l->params = params;
  json out = session_view(id, live);
  l->live = std::move(live);
  return respond(201, out);
}

ApiResponse Service::submit(const std::string& id, const session::Command& command) {
  if (!store_.contains(id)) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  auto l = lane(id);
  std::lock_guard lock(l->mutex);
  if (!l->live) {
    const SessionDocument doc = store_.load(id);
    l->params = doc.views;
    l->live = rebuild(doc);
  }
  LiveSession& live = *l->live;
  live.state = session::apply_command(live.state, live.model, live.views, command, clock_());
  store_.save(id, make_document(live.model, l->params, live.state));
  return respond(200, session_view(id, live));
}

ApiResponse Service::get_session(const std::string& id) { return {200, store_.load_text(id)}; }

ApiResponse Service::report(const std::string& id) {
  const SessionDocument doc = store_.load(id);
  if (!doc.metrics) throw Error(ErrorCode::NotConfirmed, "session '" + id + "' has not been confirmed");
  const LiveSession live = rebuild(doc);
  json attempts = json::array();
  for (const auto& a : live.state.attempts) attempts.push_back(attempt_to_json(a));
  const auto lesson = assess::lesson_for(doc.metrics->final_assessment);
  return respond(200, {{"id", id},
                       {"metrics", assess::metrics_to_json(*doc.metrics)},
                       {"assessment", assess::to_string(doc.metrics->final_assessment)},
                       {"comment", assess::comment_for(doc.metrics->final_assessment)},
                       {"lesson_id", lesson ? json(*lesson) : json(nullptr)},
                       {"attempts", std::move(attempts)}});
}

ApiResponse Service::analyze(const std::string& body) {
  const json j = parse_body(body);
  const cohort::Roster roster = cohort::roster_from_json(json_util::require(j, "roster", "request"));
  const json& sessions = json_util::require(j, "sessions", "request");
  if (!sessions.is_object()) throw Error(ErrorCode::ValidationError, "sessions must map operator id to document");
  std::map<std::string, assess::SessionMetrics> metrics;
  for (const auto& [op, doc_json] : sessions.items()) {
    const SessionDocument doc = document_from_json(doc_json);
    rebuild(doc);
    if (doc.metrics) metrics.emplace(op, *doc.metrics);
  }
  const double alpha = j.contains("alpha") ? json_util::get_number(j["alpha"], "alpha") : 0.05;
  const cohort::GroupReport report = cohort::cohort_report(roster.profiles, metrics, alpha);
  json groups = json::object();
  for (const auto& p : roster.profiles) groups[p.operator_id] = cohort::to_string(*p.group);
  return respond(200, {{"report", cohort::report_to_json(report)},
                       {"assignment", std::move(groups)},
                       {"table", cohort::report_to_table(report)}});
}

}  // namespace iliosim::service
