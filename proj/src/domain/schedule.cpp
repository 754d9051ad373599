#include "nooks/domain/schedule.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

absl::TimeZone load_zone(const std::string& name) {
  absl::TimeZone tz;
  if (!absl::LoadTimeZone(name, &tz)) {
    throw NooksError(ErrorCode::InvalidConfig, "unknown timezone: " + name);
  }
  return tz;
}

absl::Time to_absl(Instant t) { return absl::FromUnixSeconds(t.time_since_epoch().count()); }

Instant from_absl(absl::Time t) { return Instant(std::chrono::seconds(absl::ToUnixSeconds(t))); }

}  // namespace

void validate_schedule(const ScheduleConfig& schedule) {
  load_zone(schedule.timezone);
  auto in_range = [](const TimeOfDay& t) {
    return t.hour >= 0 && t.hour < 24 && t.minute >= 0 && t.minute < 60 && t.second >= 0 &&
           t.second < 60;
  };
  if (!in_range(schedule.batch_cutoff) || !in_range(schedule.activation_time)) {
    throw NooksError(ErrorCode::InvalidConfig, "schedule time out of range");
  }
  if (schedule.batch_cutoff == schedule.activation_time) {
    throw NooksError(ErrorCode::InvalidConfig, "batch_cutoff must differ from activation_time");
  }
  if (schedule.channel_lifetime <= Duration::zero()) {
    throw NooksError(ErrorCode::InvalidConfig, "channel_lifetime must be positive");
  }
  if (schedule.min_members_to_activate < 1) {
    throw NooksError(ErrorCode::InvalidConfig, "min_members_to_activate must be >= 1");
  }
}

Zone::Zone(const std::string& name) : name_(name) { load_zone(name); }

LocalDate Zone::local_date(Instant t) const {
  const auto cs = absl::ToCivilSecond(to_absl(t), load_zone(name_));
  return LocalDate{std::chrono::year(static_cast<int>(cs.year())),
                   std::chrono::month(static_cast<unsigned>(cs.month())),
                   std::chrono::day(static_cast<unsigned>(cs.day()))};
}

std::chrono::seconds Zone::local_time_of_day(Instant t) const {
  const auto cs = absl::ToCivilSecond(to_absl(t), load_zone(name_));
  return std::chrono::hours(cs.hour()) + std::chrono::minutes(cs.minute()) +
         std::chrono::seconds(cs.second());
}

Instant Zone::resolve(LocalDate day, TimeOfDay time) const {
  const absl::CivilSecond cs(static_cast<int>(day.year()), static_cast<unsigned>(day.month()),
                             static_cast<unsigned>(day.day()), time.hour, time.minute,
                             time.second);
  const auto info = load_zone(name_).At(cs);
  switch (info.kind) {
    case absl::TimeZone::TimeInfo::SKIPPED:
      return from_absl(info.trans);
    case absl::TimeZone::TimeInfo::REPEATED:
    case absl::TimeZone::TimeInfo::UNIQUE:
      break;
  }
  return from_absl(info.pre);
}

LocalDate assign_batch(Instant created_at, const ScheduleConfig& schedule) {
  const Zone zone(schedule.timezone);
  const LocalDate day = zone.local_date(created_at);
  if (zone.local_time_of_day(created_at) < schedule.batch_cutoff.since_midnight()) return day;
  return next_day(day);
}

Instant incubation_opens_at(LocalDate batch_date, const ScheduleConfig& schedule) {
  return Zone(schedule.timezone).resolve(batch_date, schedule.batch_cutoff);
}

Instant activation_at(LocalDate batch_date, const ScheduleConfig& schedule) {
  return Zone(schedule.timezone).resolve(next_day(batch_date), schedule.activation_time);
}

}  // namespace nooks
