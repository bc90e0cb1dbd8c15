#include "retrovote/service.hpp"

#include "retrovote/engine.hpp"
#include "retrovote/report_json.hpp"

#include "httplib.h"

#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace retrovote {

using nlohmann::json;

namespace {

ServiceResponse error_response(int status, std::string_view kind, const std::string& message,
                               const std::string& invariant = {}) {
  json body = {{"error", kind}, {"message", message}};
  if (!invariant.empty()) body["invariant"] = invariant;
  return {status, body.dump()};
}

std::string opaque_id() {
  static std::atomic<std::uint64_t> counter{0};
  static const std::uint64_t salt = std::random_device{}();
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << (salt ^ (++counter * 0x9E3779B97F4A7C15ull));
  return os.str();
}

void check_limits(const SimulationConfig& c, const RequestLimits& limits) {
  if (c.iterations > limits.max_iterations) {
    throw InvalidConfig("iterations_limit", "iterations must not exceed " + std::to_string(limits.max_iterations));
  }
  if (c.n_voters > limits.max_voters) {
    throw InvalidConfig("n_voters_limit", "n_voters must not exceed " + std::to_string(limits.max_voters));
  }
  if (c.n_projects > limits.max_projects) {
    throw InvalidConfig("n_projects_limit", "n_projects must not exceed " + std::to_string(limits.max_projects));
  }
}

}  // namespace

SimulationService::SimulationService(unsigned concurrent_runs, unsigned workers_per_run, RequestLimits limits)
    : workers_per_run_(workers_per_run),
      limits_(limits),
      slots_(std::clamp<std::ptrdiff_t>(concurrent_runs, 1, kMaxConcurrent)) {}

ServiceResponse SimulationService::health() const { return {200, json{{"status", "ok"}}.dump()}; }

ServiceResponse SimulationService::defaults() const { return {200, config_to_json(SimulationConfig{}).dump()}; }

ServiceResponse SimulationService::simulate(const std::string& body) {
  SimulationConfig config;
  try {
    const json doc = json::parse(body);
    config = config_from_json(doc);
  } catch (const json::exception& e) {
    return error_response(400, "ParseError", e.what());
  } catch (const Error& e) {
    return error_response(400, to_string(e.kind()), e.what());
  }

  try {
    validate_config(config);
    check_limits(config, limits_);
  } catch (const InvalidConfig& e) {
    return error_response(422, "InvalidConfig", e.what(), e.invariant());
  }

  try {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<kMaxConcurrent>& s;
      ~Release() { s.release(); }
    } release{slots_};
    RunOptions options;
    options.workers = workers_per_run_;
    const SimulationReport report = run_simulation(config, options);
    return {200, report_to_json(report).dump()};
  } catch (const std::exception& e) {
    const std::string id = opaque_id();
    std::cerr << "simulate failed [" << id << "]: " << e.what() << '\n';
    return {500, json{{"error", "internal"}, {"id", id}}.dump()};
  }
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(SimulationService& service) : impl_(std::make_unique<Impl>()) {
  auto reply = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get("/api/health",
                    [&service, reply](const httplib::Request&, httplib::Response& res) { reply(res, service.health()); });
  impl_->server.Get("/api/defaults", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.defaults());
  });
  impl_->server.Post("/api/simulate", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.simulate(req.body));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

int default_port() {
  if (const char* env = std::getenv("RETROVOTE_PORT")) {
    char* end = nullptr;
    const long port = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && port > 0 && port < 65536) return static_cast<int>(port);
  }
  return 8080;
}

}  // namespace retrovote
