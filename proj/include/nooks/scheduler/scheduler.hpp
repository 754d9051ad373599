#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nooks/persistence/state.hpp"

namespace nooks {

enum class EventKind { OpenIncubation, ActivateBatch, ArchiveChannel };

std::string_view to_string(EventKind k);

struct ScheduledEvent {
  EventKind kind = EventKind::OpenIncubation;
  std::optional<LocalDate> batch_date;  // OpenIncubation, ActivateBatch
  std::optional<NookId> nook;           // ArchiveChannel
  Instant due_at{};
  bool fired = false;

  bool operator==(const ScheduledEvent&) const = default;
  std::string describe() const;
};

/// Performs the side effects of scheduled events. Implementations must make
/// each effect idempotent so a re-run after a crash is harmless, and must
/// throw NooksError(PlatformFailure) to request a retry on the next tick.
class EffectRunner {
 public:
  virtual ~EffectRunner() = default;
  virtual const WorkspaceState& state() const = 0;
  virtual void open_incubation(LocalDate batch_date, Instant due_at) = 0;
  virtual void activate_batch(LocalDate batch_date, Instant due_at) = 0;
  virtual void archive_channel(const NookId& nook, Instant due_at) = 0;
};

/// Rebuilds the unfired event queue from persisted state. Contains every
/// overdue event plus the next upcoming incubation opening, sorted by due
/// time. Throws CorruptState if the state breaks a lifecycle invariant.
std::vector<ScheduledEvent> reconcile(const WorkspaceState& state, Instant now);

struct TickFailure {
  ScheduledEvent event;
  std::string error;
};

struct TickReport {
  std::vector<ScheduledEvent> executed;
  std::vector<TickFailure> failures;
};

/// Fires due events in due-time order. Whether an event has fired is read
/// back from the runner's state after every effect, so the scheduler keeps no
/// state of its own that a crash could lose.
class Scheduler {
 public:
  TickReport tick(Instant now, EffectRunner& runner);

  /// When the next tick has work: the earliest pending due instant, or `now`
  /// if something is already overdue.
  static std::optional<Instant> next_due(const WorkspaceState& state, Instant now);
};

}  // namespace nooks
