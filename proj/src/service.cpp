#include "rear/service.hpp"

#include "httplib.h"
#include "rear/report.hpp"

namespace rear::app {

using nlohmann::json;

namespace {

Reply error_reply(int status, const std::string& message, const std::vector<FieldError>& fields = {}) {
  json field_json = json::array();
  for (const auto& f : fields) field_json.push_back({{"field", f.field}, {"message", f.message}});
  return {status, {{"error", message}, {"fields", field_json}}};
}

}  // namespace

Service::Service(corpus::DocumentStore store, std::vector<eventstudy::KeyEvent> events, RunConfig defaults,
                 ServiceOptions options)
    : store_(std::move(store)), events_(std::move(events)), defaults_(std::move(defaults)), options_(options) {
  defaults_.workers = options_.workers;
  defaults_.validate();
}

Service::~Service() = default;

Reply Service::with_envelope(Reply reply, std::uint64_t seed) const {
  reply.body["engine_version"] = std::string(kEngineVersion);
  reply.body["seed"] = seed;
  return reply;
}

Reply Service::handle(std::string_view method, std::string_view path,
                      const std::map<std::string, std::string>& query, std::string_view body) const {
  std::uint64_t seed = defaults_.seed;
  Reply reply;
  try {
    if (method == "GET" && path == "/health") {
      reply = health();
    } else if (method == "GET" && path == "/datasets") {
      reply = datasets();
    } else if (method == "GET" && path == "/events") {
      reply = events();
    } else if (method == "GET" && path == "/series") {
      reply = series(query);
    } else if (method == "POST" && path.starts_with("/analyze/")) {
      const auto parsed = json::parse(body.empty() ? std::string_view("{}") : body, nullptr, false);
      if (parsed.is_object()) {
        if (const auto it = parsed.find("seed"); it != parsed.end() && it->is_number_unsigned()) {
          seed = it->get<std::uint64_t>();
        }
      }
      reply = analyze(path.substr(std::string_view("/analyze/").size()), body);
    } else {
      reply = error_reply(404, "no such endpoint: " + std::string(method) + " " + std::string(path));
    }
  } catch (const RequestError& e) {
    reply = error_reply(400, e.what(), e.fields());
  } catch (const ConfigError& e) {
    reply = error_reply(400, e.what(), {{"config", e.what()}});
  } catch (const NotFoundError& e) {
    reply = error_reply(404, e.what());
  } catch (const DataError& e) {
    reply = error_reply(422, e.what());
  } catch (const std::exception& e) {
    reply = error_reply(500, e.what());
  }
  return with_envelope(std::move(reply), seed);
}

Reply Service::health() const {
  return {200,
          {{"status", "ok"},
           {"documents", store_.size()},
           {"events", events_.size()},
           {"generator", std::string(stats::RandomPlan::kGeneratorVersion)}}};
}

Reply Service::datasets() const { return {200, {{"datasets", datasets_json(store_.documents(), defaults_)}}}; }

Reply Service::events() const { return {200, {{"events", eventstudy::events_to_json(events_)}}}; }

Reply Service::series(const std::map<std::string, std::string>& query) const {
  json body = json::object();
  std::vector<FieldError> errors;
  for (const auto& [key, value] : query) {
    if (key == "layer") {
      try {
        std::size_t used = 0;
        const int layer = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        body["layer"] = layer;
      } catch (const std::exception&) {
        errors.push_back({"layer", "must be an integer"});
      }
    } else if (key == "dataset" || key == "mode" || key == "start" || key == "end") {
      body[key] = value;
    } else {
      errors.push_back({key, "unknown parameter"});
    }
  }
  if (!errors.empty()) throw RequestError(std::move(errors));
  const RunConfig cfg = RunConfig::from_json(body, defaults_);
  const auto dataset = build_dataset(store_.documents(), cfg);
  const auto series = dataset_series(dataset, cfg, effective_range(store_.documents(), cfg));
  return {200,
          {{"dataset", cfg.dataset_id()},
           {"layer", cfg.layer},
           {"mode", std::string(filtering::to_string(cfg.mode))},
           {"documents", dataset.selected.size()},
           {"layer_counts", filtering::layer_summary_json(dataset.assignment)},
           {"series", report::emit_series_chart(series)}}};
}

Reply Service::analyze(std::string_view analysis, std::string_view body) const {
  const auto id = eventstudy::parse_analysis(analysis);
  if (!id) throw NotFoundError("unknown analysis: " + std::string(analysis));
  const auto parsed = json::parse(body.empty() ? std::string_view("{}") : body, nullptr, false);
  if (parsed.is_discarded()) throw RequestError("body", "is not valid JSON");
  RunConfig cfg = RunConfig::from_json(parsed, defaults_);
  cfg.workers = options_.workers;
  const auto window_cfg = cfg.window_config(*id);
  const auto work = projected_work(window_cfg, *id, events_.size());
  if (work > options_.permutation_budget) {
    throw BudgetError("projected work " + std::to_string(work) + " exceeds the service budget of " +
                      std::to_string(options_.permutation_budget) + " resampling draws");
  }
  auto run = run_analysis(store_.documents(), events_, cfg, *id);
  json out = std::move(run.document);
  out["chart"] = std::move(run.chart);
  return {200, std::move(out)};
}

void Service::listen(const std::string& host, int port, const std::function<void(int)>& on_ready) {
  server_ = std::make_unique<httplib::Server>();
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const Reply reply = handle(req.method, req.path, query, req.body);
    res.status = reply.status;
    res.set_content(reply.body.dump(), "application/json");
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  if (on_ready) on_ready(bound);
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace rear::app
