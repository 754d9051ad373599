#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "nooks/domain/schedule.hpp"
#include "nooks/platform/localchat.hpp"
#include "nooks/scheduler/clock.hpp"
#include "nooks/service/workspace.hpp"

namespace nooks::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "nooks-test-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline LocalDate ymd(int y, unsigned m, unsigned d) {
  return LocalDate{std::chrono::year(y), std::chrono::month(m), std::chrono::day(d)};
}

/// Local wall time in `tz` as an instant.
inline Instant local(const std::string& tz, LocalDate day, int h, int m = 0, int s = 0) {
  return Zone(tz).resolve(day, TimeOfDay{h, m, s});
}

inline Instant utc(LocalDate day, int h, int m = 0, int s = 0) {
  return std::chrono::sys_days(day) + std::chrono::hours(h) + std::chrono::minutes(m) + std::chrono::seconds(s);
}

/// Small deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }
  UserSet subset(const std::vector<UserId>& from, double p) {
    UserSet out;
    for (const auto& u : from) {
      if (coin(p)) out.insert(u);
    }
    return out;
  }
  std::string word(int min_len = 3, int max_len = 9) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
    std::string s;
    const int n = uniform(min_len, max_len);
    for (int i = 0; i < n; ++i) s += letters[static_cast<std::size_t>(uniform(0, 25))];
    return s;
  }
  std::string sentence(int words) {
    std::string s;
    for (int i = 0; i < words; ++i) s += (i ? " " : "") + word();
    return s;
  }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline std::vector<UserId> user_ids(int n, const std::string& prefix = "u") {
  std::vector<UserId> out;
  char buf[32];
  for (int i = 1; i <= n; ++i) {
    std::snprintf(buf, sizeof buf, "%s%02d", prefix.c_str(), i);
    out.emplace_back(buf);
  }
  return out;
}

/// A fully wired workspace on a virtual clock, with `members` onboarded.
struct Fixture {
  explicit Fixture(std::vector<UserId> member_ids, ScheduleConfig schedule = {},
                   Instant start = utc(ymd(2024, 3, 4), 9), std::uint64_t seed = 1)
      : clock(start), chat(clock), members(std::move(member_ids)) {
    chat.add_user(admin, "Admin");
    UserSet everyone{admin};
    for (const auto& m : members) {
      chat.add_user(m, "Name " + m.str());
      everyone.insert(m);
    }
    chat.add_public_channel("general", everyone);
    Workspace::Options options;
    options.log.fsync = false;
    options.seed = seed;
    ws = Workspace::install(dir.path() / "ws", "test", admin, schedule, chat, clock, options);
    ws->onboard_channel("general");
    for (const auto& m : members) ws->signup(ws->state().invites.at(m), "Name " + m.str(), {}, true);
  }

  /// Fires everything due up to and including `t`, stepping through each due
  /// instant.
  void run_until(Instant t) {
    for (auto due = ws->next_due(); due && *due <= t; due = ws->next_due()) {
      clock.set(*due);
      auto report = ws->tick();
      if (!report.failures.empty()) break;
    }
    clock.set(t);
  }

  NookId create(const UserId& creator, std::string topic, UserSet excluded = {}, bool two_others = false,
                std::string thoughts = "some thoughts") {
    NookDraft d{creator, std::move(topic), std::move(thoughts), "title", std::move(excluded), two_others};
    return ws->create_nook(std::move(d));
  }

  Workspace::Options reopen_options() const {
    Workspace::Options o;
    o.log.fsync = false;
    o.seed = 1;
    return o;
  }

  TempDir dir;
  VirtualClock clock;
  LocalChat chat;
  UserId admin{"admin"};
  std::vector<UserId> members;
  std::unique_ptr<Workspace> ws;
};

}  // namespace nooks::testing
