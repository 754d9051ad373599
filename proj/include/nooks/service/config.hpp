#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nooks/domain/schedule.hpp"

namespace nooks {

/// Process configuration. Text format, one `key = value` per line, `#` starts
/// a comment:
///
///   data_dir = /var/lib/nooks
///   workspace = acme
///   listen = 127.0.0.1:8080
///   static_dir = /usr/share/nooks/web
///   tick_seconds = 1
///   fsync = true
///   timezone = America/New_York     # workspace defaults, used at install
///   batch_cutoff = 16:00
///   activation_time = 12:00
///   channel_lifetime = 24h
///   min_members_to_activate = 2
struct Config {
  std::filesystem::path data_dir = "./nooks-data";
  std::string workspace = "default";
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::optional<std::filesystem::path> static_dir;
  int tick_seconds = 1;
  bool fsync = true;
  ScheduleConfig schedule;

  std::filesystem::path workspace_dir() const { return data_dir / workspace; }
};

/// Throws NooksError(InvalidConfig) naming the offending line.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& file);
/// Reads the file named by NOOKS_CONFIG, or returns defaults when unset.
Config config_from_env();

}  // namespace nooks
