#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nooks/domain/schedule.hpp"
#include "nooks/domain/types.hpp"
#include "nooks/persistence/state.hpp"

namespace nooks::sim {

/// A member known to the chat platform. Onboarded (invited, signed up,
/// consented) at scenario start unless `onboard` is false.
struct MemberStub {
  UserId id;
  std::string name;
  std::map<std::string, std::string> demographics;
  bool onboard = true;
};

struct Step {
  Duration at{};       // offset from scenario start
  std::string action;  // create_nook, respond, post_message, ...
  nlohmann::json args;
  std::optional<std::string> expect_error;  // ErrorCode name
};

/// A scenario document (JSON):
///
///   name, seed, timezone, start ("YYYY-MM-DDTHH:MM:SS", local),
///   schedule {batch_cutoff, activation_time, channel_lifetime, min_members_to_activate},
///   admin, members [{id, name, demographics, onboard}],
///   script [{at: "+1d2h", action, ...args, expect_error}],
///   end ("+3d"; defaults to the last step), expectations [{type, ...}]
///
/// Every time is an offset from `start` and resolved in `timezone`.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  ScheduleConfig schedule;
  std::string start_local = "2024-01-01T00:00:00";
  UserId admin{"admin"};
  std::vector<MemberStub> members;
  std::vector<Step> script;
  std::optional<Duration> end;
  std::vector<nlohmann::json> expectations;
};

/// Throws NooksError(ParseError) describing the first problem.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& file);

struct RunOptions {
  /// Output directory: workspace/ (event log), traffic.jsonl, report.json,
  /// participation.log. Any previous workspace/ in it is replaced.
  std::filesystem::path out_dir;
  bool fsync = false;
  /// Kill the process just before the event with each of these sequence
  /// numbers is written; the runner restarts and carries on.
  std::set<std::uint64_t> crash_before_sequences;
};

struct RunResult {
  bool passed = true;
  nlohmann::json report;
  WorkspaceState final_state;
  int restarts = 0;
};

RunResult run(const Scenario& scenario, const RunOptions& options);

}  // namespace nooks::sim
