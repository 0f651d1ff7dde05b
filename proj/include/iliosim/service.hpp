#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "iliosim/document.hpp"
#include "iliosim/error.hpp"
#include "iliosim/store.hpp"

namespace iliosim::service {

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

/// HTTP status for a library error: 404 NotFound, 409 for phase/cursor
/// conflicts, 400 for anything wrong with the request itself.
int status_for(ErrorCode code);

/// Request handling shared by the HTTP server and the tests.
///
/// Endpoints:
///   POST /sessions                  create (body: optional anatomy + views)
///   POST /sessions/{id}/commands    submit one command
///   POST /sessions/{id}/confirm     confirm the current trajectory
///   GET  /sessions/{id}             stored session document
///   GET  /sessions/{id}/report      metrics, comment and lesson of a confirmed session
///   POST /cohort/analyze            group report for a roster + session documents
///
/// Commands on one session are serialized through a per-session lane; other
/// sessions proceed in parallel.
class Service {
 public:
  using Clock = std::function<double()>;

  explicit Service(std::filesystem::path store_dir, Clock clock = {});

  ApiResponse handle(const ApiRequest& request);

  SessionStore& store() { return store_; }

 private:
  struct Lane {
    std::mutex mutex;
    std::optional<LiveSession> live;
    fluoro::ViewParams params;
  };

  std::shared_ptr<Lane> lane(const std::string& id);
  ApiResponse create_session(const std::string& body);
  ApiResponse submit(const std::string& id, const session::Command& command);
  ApiResponse get_session(const std::string& id);
  ApiResponse report(const std::string& id);
  ApiResponse analyze(const std::string& body);

  SessionStore store_;
  Clock clock_;
  std::mutex lanes_mutex_;
  std::map<std::string, std::shared_ptr<Lane>> lanes_;
};

/// Blocking HTTP server on host:port backed by a Service.
int serve(const std::string& host, int port, const std::filesystem::path& store_dir);

}  // namespace iliosim::service
