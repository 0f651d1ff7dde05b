#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "iliosim/json_util.hpp"
#include "iliosim/service.hpp"

using namespace iliosim;
using namespace iliosim::service;
using json_util::json;

namespace {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("iliosim-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

Service::Clock ticking() {
  auto t = std::make_shared<std::atomic<int>>(0);
  return [t] { return static_cast<double>((*t)++); };
}

json body_of(const ApiResponse& r) { return json::parse(r.body); }

ApiResponse post(Service& s, const std::string& path, const json& body = json::object()) {
  return s.handle({"POST", path, body.dump()});
}

ApiResponse command(Service& s, const std::string& id, const json& cmd) {
  return post(s, "/sessions/" + id + "/commands", {{"command", cmd}});
}

std::string create(Service& s) {
  const auto r = post(s, "/sessions");
  REQUIRE(r.status == 201);
  return body_of(r)["id"].get<std::string>();
}

}  // namespace

TEST_CASE("session lifecycle over the API") {
  TempDir dir;
  Service svc(dir.path(), ticking());
  const auto created = post(svc, "/sessions");
  REQUIRE(created.status == 201);
  const json c = body_of(created);
  const std::string id = c["id"];
  CHECK(c["state"]["phase"] == "Positioning");
  CHECK(c["images"]["current"].is_null());
  CHECK(c["counters"]["xray_count"] == 0);

  auto r = command(svc, id, {{"type", "XRay"}, {"view", "AP"}});
  CHECK(r.status == 200);
  CHECK(body_of(r)["images"]["current"]["seq"] == 1);
  CHECK(body_of(r)["images"]["previous"].is_null());
  r = command(svc, id, {{"type", "PushIn"}, {"advance", 110.0}});
  REQUIRE(r.status == 200);
  CHECK(body_of(r)["state"]["phase"] == "Inserted");

  r = command(svc, id, {{"type", "Place"}, {"delta", {1.0, 0.0}}});
  CHECK(r.status == 409);
  CHECK(body_of(r)["error"] == "IllegalInPhase");

  r = command(svc, id, {{"type", "XRay"}, {"view", "Inlet"}});
  CHECK(body_of(r)["images"]["previous"]["seq"] == 1);
  r = command(svc, id, {{"type", "Following"}});
  CHECK(r.status == 409);
  CHECK(body_of(r)["error"] == "CursorOutOfRange");

  CHECK(svc.handle({"GET", "/sessions/" + id + "/report", ""}).status == 409);

  r = post(svc, "/sessions/" + id + "/confirm");
  REQUIRE(r.status == 200);
  const json done = body_of(r);
  CHECK(done["assessment"] == "Success");
  CHECK(done["lesson_id"].is_null());
  CHECK(done["comment"] == "Successful trajectory: intra-osseous aspect and sufficient depth");
  CHECK(done["metrics"]["xray_count"] == 2);

  const auto rep = svc.handle({"GET", "/sessions/" + id + "/report", ""});
  REQUIRE(rep.status == 200);
  CHECK(body_of(rep)["metrics"] == done["metrics"]);

  CHECK(post(svc, "/sessions/" + id + "/confirm").status == 409);

  const auto doc = svc.handle({"GET", "/sessions/" + id, ""});
  REQUIRE(doc.status == 200);
  CHECK(body_of(doc)["format_version"] == 1);
  CHECK(body_of(doc)["events"].size() == 4);
}

TEST_CASE("antero-cranial exit names its lesson") {
  TempDir dir;
  Service svc(dir.path(), ticking());
  const std::string id = create(svc);
  const auto model = anatomy::default_anatomy();
  const Vec3 d = (model.corridor.axis + 0.3 * model.antero_cranial_dir).normalized();
  REQUIRE(command(svc, id, {{"type", "Orientate"}, {"direction", json_util::to_json(d)}}).status == 200);
  REQUIRE(command(svc, id, {{"type", "PushIn"}, {"advance", 110.0}}).status == 200);
  const json done = body_of(post(svc, "/sessions/" + id + "/confirm"));
  CHECK(done["assessment"] == "AnteroCranialPenetration");
  CHECK(done["comment"] == "Unsatisfactory trajectory: antero cranial penetration");
  CHECK(done["lesson_id"] == "lesson.antero-cranial");
  CHECK(done["metrics"]["iatrogenic_level"] == 5);
}

TEST_CASE("error mapping") {
  TempDir dir;
  Service svc(dir.path(), ticking());
  const std::string id = create(svc);
  CHECK(command(svc, "session-999999", {{"type", "Return"}}).status == 404);
  CHECK(svc.handle({"GET", "/sessions/nope", ""}).status == 404);
  CHECK(svc.handle({"GET", "/nowhere", ""}).status == 404);
  CHECK(svc.handle({"POST", "/sessions/" + id + "/commands", "{not json"}).status == 400);
  CHECK(post(svc, "/sessions/" + id + "/commands", json::object()).status == 400);
  const auto bad = command(svc, id, {{"type", "Jump"}});
  CHECK(bad.status == 400);
  CHECK(body_of(bad)["error"] == "InvalidCommand");
  CHECK(command(svc, id, {{"type", "PushIn"}, {"advance", -1}}).status == 400);
  CHECK(svc.handle({"DELETE", "/sessions/" + id, ""}).status == 405);
  CHECK(post(svc, "/sessions", {{"views", {{"inlet_tilt_deg", 0}}}}).status == 400);
  CHECK(status_for(ErrorCode::NotConfirmed) == 409);
  CHECK(status_for(ErrorCode::MissingMetrics) == 400);
}

TEST_CASE("identical request sequences give identical responses") {
  auto run = [] {
    TempDir dir;
    Service svc(dir.path(), ticking());
    std::vector<std::string> bodies;
    const std::string id = create(svc);
    for (const json& c : {json{{"type", "XRay"}, {"view", "Outlet"}}, json{{"type", "PushIn"}, {"advance", 70.0}},
                          json{{"type", "Return"}}, json{{"type", "Place"}, {"delta", {0.5, -0.5}}},
                          json{{"type", "PushIn"}, {"advance", 105.0}}, json{{"type", "XRay"}, {"view", "AP"}},
                          json{{"type", "Previous"}}}) {
      bodies.push_back(command(svc, id, c).body);
    }
    bodies.push_back(post(svc, "/sessions/" + id + "/confirm").body);
    bodies.push_back(svc.handle({"GET", "/sessions/" + id, ""}).body);
    bodies.push_back(svc.handle({"GET", "/sessions/" + id + "/report", ""}).body);
    return bodies;
  };
  CHECK(run() == run());
}

TEST_CASE("a restarted service picks up stored sessions") {
  TempDir dir;
  std::string id;
  {
    Service svc(dir.path(), ticking());
    id = create(svc);
    REQUIRE(command(svc, id, {{"type", "PushIn"}, {"advance", 50.0}}).status == 200);
  }
  Service again(dir.path(), [] { return 100.0; });
  const auto r = command(again, id, {{"type", "PushIn"}, {"advance", 60.0}});
  REQUIRE(r.status == 200);
  CHECK(body_of(r)["state"]["pose"]["depth"] == 110.0);
  CHECK(create(again) != id);
}

TEST_CASE("commands on one session never interleave") {
  for (int round = 0; round < 20; ++round) {
    TempDir dir;
    Service svc(dir.path(), ticking());
    const std::string id = create(svc);
    const json a = {{"type", "PushIn"}, {"advance", 80.0}};
    const json b = {{"type", "XRay"}, {"view", "AP"}};
    std::thread ta([&] { command(svc, id, a); });
    std::thread tb([&] { command(svc, id, b); });
    ta.join();
    tb.join();
    const std::string got = svc.handle({"GET", "/sessions/" + id, ""}).body;

    auto serial = [&](const json& first, const json& second) {
      TempDir d2;
      Service s2(d2.path(), ticking());
      const std::string id2 = create(s2);
      command(s2, id2, first);
      command(s2, id2, second);
      return s2.handle({"GET", "/sessions/" + id2, ""}).body;
    };
    const bool matches = got == serial(a, b) || got == serial(b, a);
    REQUIRE(matches);
  }
}

TEST_CASE("distinct sessions run in parallel") {
  TempDir dir;
  Service svc(dir.path(), ticking());
  std::vector<std::string> ids;
  for (int i = 0; i < 6; ++i) ids.push_back(create(svc));
  std::vector<std::thread> threads;
  for (const auto& id : ids) {
    threads.emplace_back([&svc, id] {
      for (int k = 0; k < 5; ++k) command(svc, id, {{"type", "XRay"}, {"view", "AP"}});
      post(svc, "/sessions/" + id + "/confirm");
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& id : ids) {
    const json rep = body_of(svc.handle({"GET", "/sessions/" + id + "/report", ""}));
    CHECK(rep["metrics"]["xray_count"] == 5);
  }
}

TEST_CASE("store round trip and failure modes") {
  TempDir dir;
  SessionStore store(dir.path());
  const auto model = anatomy::default_anatomy();
  const auto views = fluoro::standard_views(model);
  const std::vector<session::Command> script{session::cmd::XRay{}, session::cmd::PushIn{105.0},
                                             session::cmd::XRay{fluoro::ViewName::Inlet}, session::cmd::Confirm{}};
  const auto state = session::replay(model, views, script);
  const SessionDocument doc = make_document(model, {}, state);
  REQUIRE(doc.metrics);
  const std::string id = store.save(doc);
  CHECK(SessionStore::valid_id(id));
  CHECK(to_canonical(store.load(id)) == to_canonical(doc));
  CHECK(store.load_text(id) == to_canonical(doc));
  CHECK(store.load(id) == doc);
  CHECK(rebuild(store.load(id)).state == state);

  auto code_of = [](const auto& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ParseError;
  };
  CHECK(code_of([&] { store.load("missing"); }) == ErrorCode::NotFound);
  CHECK(code_of([&] { store.load("../etc"); }) == ErrorCode::NotFound);

  json future = document_to_json(doc);
  future["format_version"] = 999;
  std::ofstream(dir.path() / "future.json") << future.dump();
  CHECK(code_of([&] { store.load("future"); }) == ErrorCode::VersionMismatch);

  json tampered = document_to_json(doc);
  tampered["metrics"]["xray_count"] = 7;
  std::ofstream(dir.path() / "tampered.json") << tampered.dump();
  const SessionDocument t = store.load("tampered");
  CHECK(code_of([&] { rebuild(t); }) == ErrorCode::CorruptDocument);

  std::ofstream(dir.path() / "garbage.json") << "{\"format_version\": 1, \"events\": 3}";
  CHECK(code_of([&] { store.load("garbage"); }) == ErrorCode::CorruptDocument);
}

TEST_CASE("cohort analysis endpoint") {
  TempDir dir;
  Service svc(dir.path(), ticking());
  json sessions = json::object();
  json operators = json::array();
  for (int i = 0; i < 4; ++i) {
    const std::string id = create(svc);
    for (int k = 0; k <= i; ++k) command(svc, id, {{"type", "XRay"}, {"view", "AP"}});
    command(svc, id, {{"type", "PushIn"}, {"advance", 105.0}});
    post(svc, "/sessions/" + id + "/confirm");
    const std::string op = "op" + std::to_string(i);
    sessions[op] = body_of(svc.handle({"GET", "/sessions/" + id, ""}));
    operators.push_back({{"operator_id", op},
                         {"experience_bucket", i % 2 ? "Zero" : "MoreThanFive"},
                         {"group", i < 2 ? "G1" : "G2"},
                         {"items",
                          {{{"item_id", "t"}, {"category", "Theoretical"}, {"correct", true}},
                           {{"item_id", "p"}, {"category", "Procedural"}, {"correct", i == 0}}}}});
  }
  const json roster = {{"format_version", 1}, {"operators", operators}};
  auto r = post(svc, "/cohort/analyze", {{"roster", roster}, {"sessions", sessions}});
  REQUIRE(r.status == 200);
  const json out = body_of(r);
  CHECK(out["report"]["groups"]["G1"]["All"]["xray_total"] == 3);
  CHECK(out["report"]["groups"]["G2"]["All"]["xray_total"] == 7);
  CHECK(out["assignment"]["op3"] == "G2");
  CHECK(out["table"].get<std::string>().find("G1") != std::string::npos);

  sessions.erase("op3");
  r = post(svc, "/cohort/analyze", {{"roster", roster}, {"sessions", sessions}});
  CHECK(r.status == 400);
  CHECK(body_of(r)["error"] == "MissingMetrics");
}
