#include <gtest/gtest.h>

#include "nooks/scheduler/scheduler.hpp"
#include "support.hpp"

namespace nooks {
namespace {

using testing::Fixture;
using testing::local;
using testing::utc;
using testing::ymd;

NookState state_of(const Fixture& f, const NookId& n) { return f.ws->state().find_nook(n)->state; }

TEST(Scheduler, DailyRoutineInstants) {
  Fixture f(testing::user_ids(3));
  const auto& u = f.members;
  f.clock.set(utc(ymd(2024, 3, 4), 10));
  auto n = f.create(u[0], "routine");

  f.run_until(utc(ymd(2024, 3, 4), 15, 59, 59));
  EXPECT_EQ(state_of(f, n), NookState::Queued);
  f.run_until(utc(ymd(2024, 3, 4), 16));
  EXPECT_EQ(state_of(f, n), NookState::Incubating);

  f.ws->respond(n, u[1], Choice::Interested);
  f.run_until(utc(ymd(2024, 3, 5), 11, 59, 59));
  EXPECT_EQ(state_of(f, n), NookState::Incubating);
  f.run_until(utc(ymd(2024, 3, 5), 12));
  EXPECT_EQ(state_of(f, n), NookState::Activated);
  const ChannelRecord* ch = f.ws->state().find_channel(n);
  ASSERT_NE(ch, nullptr);
  EXPECT_EQ(ch->activated_at, utc(ymd(2024, 3, 5), 12));
  EXPECT_EQ(ch->archive_due_at, utc(ymd(2024, 3, 6), 12));

  f.run_until(utc(ymd(2024, 3, 6), 11, 59, 59));
  EXPECT_EQ(state_of(f, n), NookState::Activated);
  f.run_until(utc(ymd(2024, 3, 6), 12));
  EXPECT_EQ(state_of(f, n), NookState::Archived);
  EXPECT_EQ(f.ws->state().find_channel(n)->archived_at, utc(ymd(2024, 3, 6), 12));
}

TEST(Scheduler, TickIsIdempotent) {
  Fixture f(testing::user_ids(3));
  f.create(f.members[0], "again");
  f.clock.set(utc(ymd(2024, 3, 4), 16));
  auto first = f.ws->tick();
  EXPECT_EQ(first.executed.size(), 1u);
  const auto seq = f.ws->state().next_sequence;
  auto second = f.ws->tick();
  EXPECT_TRUE(second.executed.empty());
  EXPECT_EQ(f.ws->state().next_sequence, seq);
}

TEST(Scheduler, OverdueEventsFireInOrder) {
  Fixture f(testing::user_ids(3));
  const auto& u = f.members;
  auto n = f.create(u[0], "late");
  f.clock.set(utc(ymd(2024, 3, 8), 9));
  // Only the opening was queued; activation is discovered once it has fired.
  for (int i = 0; i < 5 && f.ws->next_due() && *f.ws->next_due() <= f.clock.now(); ++i) f.ws->tick();
  const Nook* nook = f.ws->state().find_nook(n);
  EXPECT_EQ(nook->state, NookState::NotActivated);
  EXPECT_EQ(nook->not_activated_reason, NotActivatedReason::TooFewMembers);
}

TEST(Scheduler, PlatformFailureRetriesOnNextTick) {
  Fixture f(testing::user_ids(3));
  const auto& u = f.members;
  auto n = f.create(u[0], "flaky");
  f.run_until(utc(ymd(2024, 3, 4), 16));
  f.ws->respond(n, u[1], Choice::Interested);
  f.clock.set(utc(ymd(2024, 3, 5), 12));
  f.chat.fail_next(1);
  auto report = f.ws->tick();
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].event.kind, EventKind::ActivateBatch);
  EXPECT_EQ(state_of(f, n), NookState::Incubating);
  EXPECT_EQ(f.ws->next_due(), f.clock.now());

  f.clock.advance(std::chrono::minutes(1));
  report = f.ws->tick();
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(state_of(f, n), NookState::Activated);
  EXPECT_EQ(f.chat.private_channel_count(), 1u);
  EXPECT_EQ(f.ws->state().find_channel(n)->activated_at, utc(ymd(2024, 3, 5), 12));
}

TEST(Reconcile, FreshWorkspaceQueuesNextOpening) {
  Fixture f(testing::user_ids(2));
  auto q = reconcile(f.ws->state(), f.clock.now());
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(q[0].kind, EventKind::OpenIncubation);
  EXPECT_EQ(q[0].batch_date, ymd(2024, 3, 4));
  EXPECT_EQ(q[0].due_at, utc(ymd(2024, 3, 4), 16));
}

TEST(Reconcile, ListsEveryOverdueEventSorted) {
  Fixture f(testing::user_ids(3));
  const auto& u = f.members;
  auto n = f.create(u[0], "one");
  f.run_until(utc(ymd(2024, 3, 4), 16));
  f.ws->respond(n, u[1], Choice::Interested);
  f.run_until(utc(ymd(2024, 3, 5), 12));
  ASSERT_EQ(state_of(f, n), NookState::Activated);

  const Instant later = utc(ymd(2024, 3, 7), 0);
  auto q = reconcile(f.ws->state(), later);
  ASSERT_GE(q.size(), 2u);
  for (std::size_t i = 1; i < q.size(); ++i) EXPECT_LE(q[i - 1].due_at, q[i].due_at);
  bool archive = false;
  for (const auto& e : q) {
    EXPECT_FALSE(e.fired);
    if (e.kind == EventKind::ArchiveChannel) {
      archive = true;
      EXPECT_EQ(e.nook, n);
      EXPECT_EQ(e.due_at, utc(ymd(2024, 3, 6), 12));
    }
  }
  EXPECT_TRUE(archive);
  EXPECT_EQ(Scheduler::next_due(f.ws->state(), later), later);
}

TEST(Reconcile, UnarchivedChannelsAreNeverRearchived) {
  Fixture f(testing::user_ids(3));
  const auto& u = f.members;
  auto n = f.create(u[0], "keep");
  f.run_until(utc(ymd(2024, 3, 4), 16));
  f.ws->respond(n, u[1], Choice::Interested);
  f.run_until(utc(ymd(2024, 3, 6), 12));
  f.ws->unarchive(n, u[1]);
  EXPECT_EQ(state_of(f, n), NookState::Persistent);
  f.run_until(utc(ymd(2024, 3, 20), 12));
  EXPECT_EQ(state_of(f, n), NookState::Persistent);
  EXPECT_FALSE(f.ws->state().find_channel(n)->archived);
  for (const auto& e : reconcile(f.ws->state(), f.clock.now())) EXPECT_NE(e.kind, EventKind::ArchiveChannel);
}

TEST(Scheduler, FollowsDaylightSavingChanges) {
  ScheduleConfig s;
  s.timezone = "America/New_York";
  const std::string tz = s.timezone;
  // Spring forward happens early on Sunday 2024-03-10.
  Fixture f(testing::user_ids(3), s, local(tz, ymd(2024, 3, 9), 10));
  const auto& u = f.members;
  auto n = f.create(u[0], "dst");
  EXPECT_EQ(f.ws->state().find_nook(n)->batch_date, ymd(2024, 3, 9));
  f.run_until(local(tz, ymd(2024, 3, 9), 16));
  EXPECT_EQ(state_of(f, n), NookState::Incubating);
  f.ws->respond(n, u[1], Choice::Interested);
  f.run_until(local(tz, ymd(2024, 3, 10), 12));
  ASSERT_EQ(state_of(f, n), NookState::Activated);
  const ChannelRecord* ch = f.ws->state().find_channel(n);
  EXPECT_EQ(ch->activated_at, utc(ymd(2024, 3, 10), 16));
  // Lifetime is elapsed time, not wall time.
  EXPECT_EQ(ch->archive_due_at, utc(ymd(2024, 3, 11), 16));
}

TEST(Scheduler, NextDueIsTheOpeningWhenIdle) {
  Fixture f(testing::user_ids(2));
  EXPECT_EQ(f.ws->next_due(), utc(ymd(2024, 3, 4), 16));
  f.run_until(utc(ymd(2024, 3, 4), 16));
  EXPECT_EQ(f.ws->next_due(), utc(ymd(2024, 3, 5), 16));
}

}  // namespace
}  // namespace nooks
