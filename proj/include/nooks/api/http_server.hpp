#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "nooks/api/api.hpp"

namespace httplib {
class Server;
}

namespace nooks {

/// HTTP/1.1 front end for Api, plus a background thread that ticks the
/// scheduler through the same service queue.
class HttpServer {
 public:
  struct Options {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::optional<std::filesystem::path> static_dir;
    std::chrono::milliseconds tick_interval{1000};
  };

  HttpServer(Api& api, Service& service, Options options);
  ~HttpServer();

  /// Binds, then serves until stop(). Returns false if binding failed.
  bool run();
  /// Binds and serves on a background thread; returns the bound port or -1.
  int start();
  void stop();

 private:
  void tick_loop();

  Api& api_;
  Service& service_;
  Options options_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> running_{false};
  std::thread ticker_;
  std::thread listener_;
};

}  // namespace nooks
