#include "nooks/scheduler/scheduler.hpp"

#include <algorithm>
#include <set>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

[[noreturn]] void corrupt(const std::string& what) { throw NooksError(ErrorCode::CorruptState, what); }

void check_consistency(const WorkspaceState& s) {
  for (const auto& [id, nook] : s.nooks) {
    const ChannelRecord* ch = s.find_channel(id);
    switch (nook.state) {
      case NookState::Queued:
        if (s.last_opened_batch && nook.batch_date <= *s.last_opened_batch) {
          corrupt("queued nook " + id.str() + " belongs to an already opened batch");
        }
        [[fallthrough]];
      case NookState::Incubating:
      case NookState::NotActivated:
        if (ch) corrupt("nook " + id.str() + " has a channel but was never activated");
        break;
      case NookState::Activated:
        if (!ch || ch->archived || ch->persistent) corrupt("activated nook " + id.str() + " has inconsistent channel");
        break;
      case NookState::Archived:
        if (!ch || !ch->archived) corrupt("archived nook " + id.str() + " has inconsistent channel");
        break;
      case NookState::Persistent:
        if (!ch || !ch->persistent) corrupt("persistent nook " + id.str() + " has inconsistent channel");
        break;
    }
    if (ch) {
      for (const auto& u : ch->members) {
        if (nook.excludes(u)) corrupt("excluded user in channel of " + id.str());
      }
    }
  }
}

int kind_rank(EventKind k) { return static_cast<int>(k); }

bool event_less(const ScheduledEvent& a, const ScheduledEvent& b) {
  if (a.due_at != b.due_at) return a.due_at < b.due_at;
  if (a.kind != b.kind) return kind_rank(a.kind) < kind_rank(b.kind);
  if (a.batch_date != b.batch_date) return a.batch_date < b.batch_date;
  return a.nook < b.nook;
}

}  // namespace

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::OpenIncubation: return "OpenIncubation";
    case EventKind::ActivateBatch: return "ActivateBatch";
    case EventKind::ArchiveChannel: return "ArchiveChannel";
  }
  return "Unknown";
}

std::string ScheduledEvent::describe() const {
  std::string out(to_string(kind));
  out += '(';
  if (batch_date) out += format_date(*batch_date);
  if (nook) out += nook->str();
  out += ")@" + format_instant(due_at);
  return out;
}

std::vector<ScheduledEvent> reconcile(const WorkspaceState& state, Instant now) {
  std::vector<ScheduledEvent> queue;
  if (!state.installed) return queue;
  check_consistency(state);

  // One incubation opening per local day, whether or not anything is queued.
  for (LocalDate d = state.next_batch_to_open();; d = next_day(d)) {
    const Instant due = incubation_opens_at(d, state.schedule);
    queue.push_back({EventKind::OpenIncubation, d, std::nullopt, due, false});
    if (due > now) break;
  }

  std::set<LocalDate> incubating_batches;
  for (const auto& [id, nook] : state.nooks) {
    if (nook.state == NookState::Incubating) incubating_batches.insert(nook.batch_date);
  }
  for (const auto& d : incubating_batches) {
    queue.push_back({EventKind::ActivateBatch, d, std::nullopt, activation_at(d, state.schedule), false});
  }

  for (const auto& [id, ch] : state.channels) {
    if (!ch.archived && !ch.persistent) {
      queue.push_back({EventKind::ArchiveChannel, std::nullopt, id, ch.archive_due_at, false});
    }
  }

  std::sort(queue.begin(), queue.end(), event_less);
  return queue;
}

TickReport Scheduler::tick(Instant now, EffectRunner& runner) {
  TickReport report;
  std::vector<ScheduledEvent> attempted;
  bool opening_failed = false;
  auto was_attempted = [&](const ScheduledEvent& e) {
    // Batches open strictly in date order, so a failed opening holds back later ones.
    if (opening_failed && e.kind == EventKind::OpenIncubation) return true;
    return std::find(attempted.begin(), attempted.end(), e) != attempted.end();
  };

  for (;;) {
    const auto queue = reconcile(runner.state(), now);
    auto next = std::find_if(queue.begin(), queue.end(),
                             [&](const ScheduledEvent& e) { return e.due_at <= now && !was_attempted(e); });
    if (next == queue.end()) break;

    ScheduledEvent event = *next;
    attempted.push_back(event);
    try {
      switch (event.kind) {
        case EventKind::OpenIncubation: runner.open_incubation(*event.batch_date, event.due_at); break;
        case EventKind::ActivateBatch: runner.activate_batch(*event.batch_date, event.due_at); break;
        case EventKind::ArchiveChannel: runner.archive_channel(*event.nook, event.due_at); break;
      }
      event.fired = true;
      report.executed.push_back(event);
    } catch (const NooksError& e) {
      if (e.code() != ErrorCode::PlatformFailure) throw;
      if (event.kind == EventKind::OpenIncubation) opening_failed = true;
      report.failures.push_back({event, e.what()});
    }
  }
  return report;
}

std::optional<Instant> Scheduler::next_due(const WorkspaceState& state, Instant now) {
  const auto queue = reconcile(state, now);
  std::optional<Instant> best;
  for (const auto& e : queue) {
    // Overdue work (a failed effect awaiting retry) is due right away.
    const Instant at = std::max(e.due_at, now);
    if (!best || at < *best) best = at;
  }
  return best;
}

}  // namespace nooks
