#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rear/app.hpp"

namespace httplib {
class Server;
}

namespace rear::app {

struct ServiceOptions {
  // Analyses whose projected_work exceeds this are refused with 422.
  std::uint64_t permutation_budget = 50'000'000;
  std::size_t workers = 1;
};

struct Reply {
  int status = 200;
  nlohmann::json body;
};

// JSON endpoints over an immutable corpus snapshot:
//   GET  /health
//   GET  /datasets
//   GET  /events
//   GET  /series?dataset=&layer=&mode=&start=&end=
//   POST /analyze/{h1..h5}
class Service {
 public:
  Service(corpus::DocumentStore store, std::vector<eventstudy::KeyEvent> events, RunConfig defaults,
          ServiceOptions options = {});
  ~Service();

  // Transport-free dispatch, also used by the HTTP layer.
  Reply handle(std::string_view method, std::string_view path, const std::map<std::string, std::string>& query,
               std::string_view body) const;

  // Blocks until stop(). Port 0 binds a free port; on_ready receives the port.
  void listen(const std::string& host, int port, const std::function<void(int)>& on_ready = {});
  void stop();

 private:
  Reply health() const;
  Reply datasets() const;
  Reply events() const;
  Reply series(const std::map<std::string, std::string>& query) const;
  Reply analyze(std::string_view analysis, std::string_view body) const;
  Reply with_envelope(Reply reply, std::uint64_t seed) const;

  corpus::DocumentStore store_;
  std::vector<eventstudy::KeyEvent> events_;
  RunConfig defaults_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace rear::app
