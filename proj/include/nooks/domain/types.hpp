#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace nooks {

/// Seconds-resolution UTC instant. Everything the scheduler decides is
/// expressed in these.
using Instant = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

/// A calendar date in the workspace's local timezone.
using LocalDate = std::chrono::year_month_day;

// Opaque identifiers get their own types so a NookId can't be passed where a
// UserId is expected.
template <typename Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;

 private:
  std::string value_;
};

using UserId = Id<struct UserIdTag>;
using NookId = Id<struct NookIdTag>;

using UserSet = std::set<UserId>;

/// Wall-clock time of day, local to the workspace timezone.
struct TimeOfDay {
  int hour = 0;
  int minute = 0;
  int second = 0;

  friend auto operator<=>(const TimeOfDay&, const TimeOfDay&) = default;
  friend bool operator==(const TimeOfDay&, const TimeOfDay&) = default;

  std::chrono::seconds since_midnight() const {
    return std::chrono::hours(hour) + std::chrono::minutes(minute) + std::chrono::seconds(second);
  }
};

struct MemberProfile {
  UserId user_id;
  std::string display_name;
  bool consented = false;
  std::map<std::string, std::string> demographics;
  Instant onboarded_at{};

  bool operator==(const MemberProfile&) const = default;
};

/// True for ids that are safe to use as opaque tokens: non-empty, no
/// whitespace, no control characters, no commas.
bool is_valid_user_id(std::string_view id);

std::string format_instant(Instant t);                 // 2023-07-03T14:00:00Z
std::optional<Instant> parse_instant(std::string_view s);
std::string format_date(LocalDate d);                  // 2023-07-03
std::optional<LocalDate> parse_date(std::string_view s);
std::string format_time_of_day(TimeOfDay t);           // 16:00:00
std::optional<TimeOfDay> parse_time_of_day(std::string_view s);

LocalDate next_day(LocalDate d);

/// "90s", "15m", "24h", "2d" or a concatenation such as "1d12h".
/// A bare integer is seconds.
std::optional<Duration> parse_duration(std::string_view s);
std::string format_duration(Duration d);

}  // namespace nooks
