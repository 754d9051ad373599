#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "nooks/api/sessions.hpp"
#include "nooks/domain/errors.hpp"
#include "nooks/service/service.hpp"

namespace nooks {

struct ApiRequest {
  std::string method;  // GET, POST, PUT
  std::string path;    // e.g. /api/v1/channels/nk-0001/messages
  std::map<std::string, std::string> query;
  std::string authorization;  // raw header value
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body = nlohmann::json::object();
};

int http_status(ErrorCode code);

/// Transport-free router for every `/api/v1` route. Each call runs as one
/// command on the service queue.
class Api {
 public:
  Api(Service& service, SessionStore& sessions) : service_(service), sessions_(sessions) {}

  ApiResponse handle(const ApiRequest& request);

 private:
  Service& service_;
  SessionStore& sessions_;
};

}  // namespace nooks
