#include "nooks/domain/types.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyTitle: return "EmptyTitle";
    case ErrorCode::TitleTooLong: return "TitleTooLong";
    case ErrorCode::TitleBadCharset: return "TitleBadCharset";
    case ErrorCode::EmptyTopic: return "EmptyTopic";
    case ErrorCode::SelfExclusion: return "SelfExclusion";
    case ErrorCode::UnknownExcludedUser: return "UnknownExcludedUser";
    case ErrorCode::ExcludedUser: return "ExcludedUser";
    case ErrorCode::ResponseWindowClosed: return "ResponseWindowClosed";
    case ErrorCode::NotIncubating: return "NotIncubating";
    case ErrorCode::NotOnboarded: return "NotOnboarded";
    case ErrorCode::ConsentRequired: return "ConsentRequired";
    case ErrorCode::AlreadyOnboarded: return "AlreadyOnboarded";
    case ErrorCode::UnknownInvite: return "UnknownInvite";
    case ErrorCode::BatchAlreadyOpened: return "BatchAlreadyOpened";
    case ErrorCode::DuplicateSeed: return "DuplicateSeed";
    case ErrorCode::NotAMember: return "NotAMember";
    case ErrorCode::AlreadyMember: return "AlreadyMember";
    case ErrorCode::AlreadyArchived: return "AlreadyArchived";
    case ErrorCode::AlreadyActive: return "AlreadyActive";
    case ErrorCode::ChannelArchived: return "ChannelArchived";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::UnknownChannel: return "UnknownChannel";
    case ErrorCode::UnknownNook: return "UnknownNook";
    case ErrorCode::EmptyMemberSet: return "EmptyMemberSet";
    case ErrorCode::PlatformFailure: return "PlatformFailure";
    case ErrorCode::StorageFull: return "StorageFull";
    case ErrorCode::RedactionViolation: return "RedactionViolation";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::CorruptState: return "CorruptState";
    case ErrorCode::WorkspaceBusy: return "WorkspaceBusy";
    case ErrorCode::NotInstalled: return "NotInstalled";
    case ErrorCode::AlreadyInstalled: return "AlreadyInstalled";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Unauthenticated: return "Unauthenticated";
    case ErrorCode::Forbidden: return "Forbidden";
  }
  return "Unknown";
}

bool is_valid_user_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  for (unsigned char c : id) {
    if (std::isspace(c) || std::iscntrl(c) || c == ',') return false;
  }
  return true;
}

std::string format_instant(Instant t) {
  const auto day_point = std::chrono::floor<std::chrono::days>(t);
  const std::chrono::year_month_day ymd{day_point};
  const std::chrono::hh_mm_ss hms{t - day_point};
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Instant> parse_instant(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (s.size() != 20 || s[10] != 'T' || s[19] != 'Z') return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  auto time = parse_time_of_day(s.substr(11, 8));
  if (!date || !time) return std::nullopt;
  return std::chrono::sys_days(*date) + time->since_midnight();
}

std::string format_date(LocalDate d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::optional<LocalDate> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
      !parse_int(s.substr(8, 2), d)) {
    return std::nullopt;
  }
  LocalDate date{std::chrono::year(y), std::chrono::month(static_cast<unsigned>(m)),
                 std::chrono::day(static_cast<unsigned>(d))};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_time_of_day(TimeOfDay t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", t.hour, t.minute, t.second);
  return buf;
}

std::optional<TimeOfDay> parse_time_of_day(std::string_view s) {
  // HH:MM or HH:MM:SS
  if (s.size() != 5 && s.size() != 8) return std::nullopt;
  TimeOfDay t;
  if (s[2] != ':' || !parse_int(s.substr(0, 2), t.hour) || !parse_int(s.substr(3, 2), t.minute)) {
    return std::nullopt;
  }
  if (s.size() == 8 && (s[5] != ':' || !parse_int(s.substr(6, 2), t.second))) return std::nullopt;
  if (t.hour < 0 || t.hour > 23 || t.minute < 0 || t.minute > 59 || t.second < 0 || t.second > 59) {
    return std::nullopt;
  }
  return t;
}

LocalDate next_day(LocalDate d) { return LocalDate{std::chrono::sys_days(d) + std::chrono::days(1)}; }

std::optional<Duration> parse_duration(std::string_view s) {
  if (s.empty()) return std::nullopt;
  long long bare = 0;
  if (auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), bare);
      ec == std::errc() && ptr == s.data() + s.size()) {
    return Duration(bare);
  }
  Duration total{0};
  while (!s.empty()) {
    long long n = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc() || ptr == s.data() + s.size() || n < 0) return std::nullopt;
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()));
    switch (s.front()) {
      case 's': total += Duration(n); break;
      case 'm': total += std::chrono::minutes(n); break;
      case 'h': total += std::chrono::hours(n); break;
      case 'd': total += std::chrono::days(n); break;
      default: return std::nullopt;
    }
    s.remove_prefix(1);
  }
  return total;
}

std::string format_duration(Duration d) {
  auto secs = d.count();
  if (secs != 0 && secs % 86400 == 0) return std::to_string(secs / 86400) + "d";
  if (secs != 0 && secs % 3600 == 0) return std::to_string(secs / 3600) + "h";
  if (secs != 0 && secs % 60 == 0) return std::to_string(secs / 60) + "m";
  return std::to_string(secs) + "s";
}

}  // namespace nooks
