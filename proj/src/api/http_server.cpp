#include "nooks/api/http_server.hpp"

#include <httplib.h>

#include <iostream>

namespace nooks {

HttpServer::HttpServer(Api& api, Service& service, Options options)
    : api_(api), service_(service), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request;
    request.method = req.method;
    request.path = req.path;
    for (const auto& [k, v] : req.params) request.query.emplace(k, v);
    request.authorization = req.get_header_value("Authorization");
    request.body = req.body;
    ApiResponse response = api_.handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json; charset=utf-8");
  };
  const std::string pattern = R"(/api/v1/.*)";
  server_->Get(pattern, forward);
  server_->Post(pattern, forward);
  server_->Put(pattern, forward);
  if (options_.static_dir) server_->set_mount_point("/", options_.static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::run() {
  if (!server_->bind_to_port(options_.host, options_.port)) return false;
  running_ = true;
  ticker_ = std::thread([this] { tick_loop(); });
  server_->listen_after_bind();
  return true;
}

int HttpServer::start() {
  int port = options_.port;
  if (port == 0) {
    port = server_->bind_to_any_port(options_.host);
    if (port < 0) return -1;
  } else if (!server_->bind_to_port(options_.host, port)) {
    return -1;
  }
  running_ = true;
  ticker_ = std::thread([this] { tick_loop(); });
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void HttpServer::stop() {
  running_ = false;
  server_->stop();
  if (listener_.joinable()) listener_.join();
  if (ticker_.joinable()) ticker_.join();
}

void HttpServer::tick_loop() {
  using namespace std::chrono_literals;
  auto next = std::chrono::steady_clock::now();
  while (running_) {
    if (std::chrono::steady_clock::now() >= next) {
      try {
        auto report = service_.run([](Workspace& ws) { return ws.tick(); });
        for (const auto& f : report.failures) std::cerr << "tick: " << f.event.describe() << ": " << f.error << '\n';
      } catch (const std::exception& e) {
        std::cerr << "tick failed: " << e.what() << '\n';
      }
      next = std::chrono::steady_clock::now() + options_.tick_interval;
    }
    std::this_thread::sleep_for(20ms);
  }
}

}  // namespace nooks
