#pragma once

// Local HTTP service exposing the engine:
//   GET  /api/health    -> {"status": "ok"}
//   GET  /api/defaults  -> default simulate request
//   POST /api/simulate  -> simulation report
//
// Simulations run synchronously in the request thread; a semaphore caps how
// many run at once.

#include "retrovote/types.hpp"

#include <memory>
#include <semaphore>
#include <string>

namespace retrovote {

struct RequestLimits {
  int max_iterations = 20000;
  int max_voters = 2000;
  int max_projects = 5000;
};

struct ServiceResponse {
  int status;
  std::string body;  // JSON
};

class SimulationService {
 public:
  static constexpr std::ptrdiff_t kMaxConcurrent = 64;

  explicit SimulationService(unsigned concurrent_runs = 2, unsigned workers_per_run = 0,
                             RequestLimits limits = {});

  ServiceResponse health() const;
  ServiceResponse defaults() const;
  ServiceResponse simulate(const std::string& body);

 private:
  unsigned workers_per_run_;
  RequestLimits limits_;
  std::counting_semaphore<kMaxConcurrent> slots_;
};

/// httplib server bound to a SimulationService.
class HttpServer {
 public:
  explicit HttpServer(SimulationService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `port` (0 picks a free port) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called.
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// RETROVOTE_PORT when set and valid, otherwise 8080.
int default_port();

}  // namespace retrovote
