// Eigen must be seen before httplib: <resolv.h> defines a `_res` macro that
// collides with Eigen parameter names.
#include "iliosim/service.hpp"

#include <iostream>

#include <httplib.h>

namespace iliosim::service {

int serve(const std::string& host, int port, const std::filesystem::path& store_dir) {
  Service service(store_dir);
  httplib::Server server;
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse out = service.handle({req.method, req.path, req.body});
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  server.Get(".*", forward);
  server.Post(".*", forward);
  std::cerr << "iliosim: serving on http://" << host << ":" << port << " (store " << store_dir.string() << ")\n";
  if (!server.listen(host, port)) {
    std::cerr << "iliosim: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace iliosim::service
