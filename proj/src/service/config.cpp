#include "nooks/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

int to_int(const std::string& value, int line) {
  try {
    std::size_t used = 0;
    int n = std::stoi(value, &used);
    if (used == value.size()) return n;
  } catch (const std::exception&) {
  }
  throw NooksError(ErrorCode::InvalidConfig, "line " + std::to_string(line) + ": expected an integer");
}

}  // namespace

Config parse_config(std::string_view text) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw NooksError(ErrorCode::InvalidConfig, "line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    auto bad = [&](const char* what) {
      return NooksError(ErrorCode::InvalidConfig, "line " + std::to_string(line) + ": " + key + " " + what);
    };

    if (key == "data_dir") {
      cfg.data_dir = value;
    } else if (key == "workspace") {
      if (value.empty() || value.find('/') != std::string::npos) throw bad("must be a plain name");
      cfg.workspace = value;
    } else if (key == "listen") {
      const auto colon = value.rfind(':');
      if (colon == std::string::npos) throw bad("must be host:port");
      cfg.listen_host = value.substr(0, colon);
      cfg.listen_port = to_int(value.substr(colon + 1), line);
    } else if (key == "static_dir") {
      cfg.static_dir = value;
    } else if (key == "tick_seconds") {
      cfg.tick_seconds = to_int(value, line);
      if (cfg.tick_seconds < 1) throw bad("must be positive");
    } else if (key == "fsync") {
      if (value != "true" && value != "false") throw bad("must be true or false");
      cfg.fsync = value == "true";
    } else if (key == "timezone") {
      cfg.schedule.timezone = value;
    } else if (key == "batch_cutoff" || key == "activation_time") {
      auto t = parse_time_of_day(value);
      if (!t) throw bad("must be HH:MM");
      (key == "batch_cutoff" ? cfg.schedule.batch_cutoff : cfg.schedule.activation_time) = *t;
    } else if (key == "channel_lifetime") {
      auto d = parse_duration(value);
      if (!d) throw bad("must be a duration such as 24h");
      cfg.schedule.channel_lifetime = *d;
    } else if (key == "min_members_to_activate") {
      cfg.schedule.min_members_to_activate = to_int(value, line);
    } else {
      throw bad("is not a known key");
    }
  }
  validate_schedule(cfg.schedule);
  return cfg;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw NooksError(ErrorCode::InvalidConfig, "cannot read config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Config config_from_env() {
  const char* path = std::getenv("NOOKS_CONFIG");
  if (!path || !*path) return Config{};
  return load_config(path);
}

}  // namespace nooks
