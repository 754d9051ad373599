#pragma once

#include <string>

#include "nooks/domain/types.hpp"

namespace nooks {

/// The workspace's daily routine. Nooks created before `batch_cutoff` join
/// that day's batch, incubate from the cutoff until `activation_time` the
/// next day, then live for `channel_lifetime` before auto-archival.
struct ScheduleConfig {
  std::string timezone = "UTC";
  TimeOfDay batch_cutoff{16, 0, 0};
  TimeOfDay activation_time{12, 0, 0};
  Duration channel_lifetime = std::chrono::hours(24);
  int min_members_to_activate = 2;

  bool operator==(const ScheduleConfig&) const = default;
};

/// Throws NooksError(InvalidConfig) on an unknown zone, equal cutoff and
/// activation times, a non-positive lifetime or min_members < 1.
void validate_schedule(const ScheduleConfig& schedule);

/// Conversions between UTC instants and the workspace's local calendar.
///
/// Local wall-clock times are resolved per calendar day. A time skipped by a
/// forward DST transition resolves to the first instant after the gap; a time
/// repeated by a backward transition resolves to the earlier instant.
class Zone {
 public:
  explicit Zone(const std::string& name);

  LocalDate local_date(Instant t) const;
  std::chrono::seconds local_time_of_day(Instant t) const;
  Instant resolve(LocalDate day, TimeOfDay time) const;

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Batch a nook created at `created_at` belongs to: the creation day if the
/// local time is strictly before the cutoff, otherwise the next day.
LocalDate assign_batch(Instant created_at, const ScheduleConfig& schedule);

/// Instant incubation opens for `batch_date` (the cutoff on that day).
Instant incubation_opens_at(LocalDate batch_date, const ScheduleConfig& schedule);

/// Instant the nooks of `batch_date` activate (activation time on the next day).
Instant activation_at(LocalDate batch_date, const ScheduleConfig& schedule);

}  // namespace nooks
