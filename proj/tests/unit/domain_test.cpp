#include <gtest/gtest.h>

#include "nooks/domain/activation.hpp"
#include "nooks/domain/cards.hpp"
#include "nooks/domain/encounters.hpp"
#include "nooks/domain/samples.hpp"
#include "support.hpp"

namespace nooks {
namespace {

using testing::local;
using testing::ymd;

const std::string kNewYork = "America/New_York";
const LocalDate kMonday = ymd(2024, 3, 4);

ScheduleConfig ny() {
  ScheduleConfig s;
  s.timezone = kNewYork;
  return s;
}

Nook incubating(const std::string& id, const std::string& creator, UserSet excluded = {}, bool two_others = false) {
  Nook n;
  n.id = NookId(id);
  n.draft = NookDraft{UserId(creator), "topic " + id, "thoughts " + id, "title", std::move(excluded), two_others};
  n.created_at = local(kNewYork, kMonday, 10);
  n.batch_date = kMonday;
  n.state = NookState::Incubating;
  return n;
}

InterestResponse resp(const std::string& nook, const std::string& user, Choice c, int minute) {
  return {NookId(nook), UserId(user), c, local(kNewYork, kMonday, 17, minute)};
}

TEST(ChannelTitle, AcceptsLettersAndDashes) {
  EXPECT_TRUE(validate_channel_title("mystery-novels").empty());
  EXPECT_TRUE(validate_channel_title("Mystery-Novels").empty());
  EXPECT_TRUE(validate_channel_title(std::string(59, 'a')).empty());
}

TEST(ChannelTitle, RejectsWithCodes) {
  EXPECT_EQ(validate_channel_title(""), (std::vector<ValidationError>{{"channel_title", ErrorCode::EmptyTitle}}));
  EXPECT_EQ(validate_channel_title(std::string(60, 'a')).at(0).code, ErrorCode::TitleTooLong);
  EXPECT_EQ(validate_channel_title("mystery novels").at(0).code, ErrorCode::TitleBadCharset);
  EXPECT_EQ(validate_channel_title("books2").at(0).code, ErrorCode::TitleBadCharset);
  EXPECT_EQ(validate_channel_title("caf\xc3\xa9").at(0).code, ErrorCode::TitleBadCharset);
  EXPECT_EQ(validate_channel_title("under_score").at(0).code, ErrorCode::TitleBadCharset);
}

TEST(Draft, ReportsEveryProblem) {
  const UserSet roster{UserId("a"), UserId("b")};
  NookDraft d{UserId("a"), "  ", "", "ok", {UserId("a"), UserId("zed")}, false};
  auto errors = validate_draft(d, roster);
  std::vector<ErrorCode> codes;
  for (const auto& e : errors) codes.push_back(e.code);
  EXPECT_NE(std::find(codes.begin(), codes.end(), ErrorCode::EmptyTopic), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), ErrorCode::SelfExclusion), codes.end());
  EXPECT_NE(std::find(codes.begin(), codes.end(), ErrorCode::UnknownExcludedUser), codes.end());

  NookDraft good{UserId("a"), "mystery novels", "", "mystery-novels", {UserId("b")}, true};
  EXPECT_TRUE(validate_draft(good, roster).empty());
}

TEST(AssignBatch, CutoffIsStrict) {
  const auto s = ny();
  EXPECT_EQ(assign_batch(local(kNewYork, kMonday, 15, 59, 59), s), kMonday);
  EXPECT_EQ(assign_batch(local(kNewYork, kMonday, 16, 0, 0), s), ymd(2024, 3, 5));
  EXPECT_EQ(assign_batch(local(kNewYork, kMonday, 0, 0, 0), s), kMonday);
  EXPECT_EQ(assign_batch(local(kNewYork, kMonday, 23, 59, 59), s), ymd(2024, 3, 5));
  // Sunday evening rolls into Monday's batch; weekends are ordinary days.
  EXPECT_EQ(assign_batch(local(kNewYork, ymd(2024, 3, 3), 18), s), kMonday);
}

TEST(AssignBatch, UsesWorkspaceTimezone) {
  ScheduleConfig s;  // UTC
  const Instant t = local(kNewYork, kMonday, 13);  // 18:00 UTC
  EXPECT_EQ(assign_batch(t, s), ymd(2024, 3, 5));
  EXPECT_EQ(assign_batch(t, ny()), kMonday);
}

TEST(Schedule, IncubationAndActivationInstants) {
  const auto s = ny();
  EXPECT_EQ(incubation_opens_at(kMonday, s), local(kNewYork, kMonday, 16));
  EXPECT_EQ(activation_at(kMonday, s), local(kNewYork, ymd(2024, 3, 5), 12));
  // 16:00 EST is 21:00 UTC.
  EXPECT_EQ(format_instant(incubation_opens_at(kMonday, s)), "2024-03-04T21:00:00Z");
}

TEST(Schedule, DstGapResolvesToTransitionAndOverlapToFirstOccurrence) {
  const Zone zone(kNewYork);
  // 2024-03-10 02:30 does not exist in New York; clocks jump 02:00 -> 03:00 EDT.
  EXPECT_EQ(format_instant(zone.resolve(ymd(2024, 3, 10), {2, 30, 0})), "2024-03-10T07:00:00Z");
  // 2024-11-03 01:30 happens twice; the earlier (EDT) one is used.
  EXPECT_EQ(format_instant(zone.resolve(ymd(2024, 11, 3), {1, 30, 0})), "2024-11-03T05:30:00Z");
  // Across the spring change the 16:00 cutoff moves from 21:00Z to 20:00Z.
  EXPECT_EQ(format_instant(incubation_opens_at(ymd(2024, 3, 9), ny())), "2024-03-09T21:00:00Z");
  EXPECT_EQ(format_instant(incubation_opens_at(ymd(2024, 3, 10), ny())), "2024-03-10T20:00:00Z");
}

TEST(Schedule, ValidationRejectsNonsense) {
  ScheduleConfig s;
  s.timezone = "Not/AZone";
  EXPECT_THROW(validate_schedule(s), NooksError);
  s = ScheduleConfig{};
  s.activation_time = s.batch_cutoff;
  EXPECT_THROW(validate_schedule(s), NooksError);
  s = ScheduleConfig{};
  s.channel_lifetime = Duration{0};
  EXPECT_THROW(validate_schedule(s), NooksError);
  s = ScheduleConfig{};
  s.min_members_to_activate = 0;
  EXPECT_THROW(validate_schedule(s), NooksError);
  EXPECT_NO_THROW(validate_schedule(ny()));
}

TEST(Lifecycle, OnlyDocumentedEdges) {
  using S = NookState;
  const std::vector<std::pair<S, S>> allowed = {{S::Queued, S::Incubating},      {S::Incubating, S::Activated},
                                                {S::Incubating, S::NotActivated}, {S::Activated, S::Archived},
                                                {S::Archived, S::Persistent}};
  const std::vector<S> all = {S::Queued, S::Incubating, S::Activated, S::NotActivated, S::Archived, S::Persistent};
  for (S from : all) {
    for (S to : all) {
      const bool expected = std::find(allowed.begin(), allowed.end(), std::pair{from, to}) != allowed.end();
      EXPECT_EQ(is_valid_transition(from, to), expected) << to_string(from) << "->" << to_string(to);
    }
  }
  EXPECT_THROW(transition(incubating("n", "a"), S::Archived), NooksError);
  EXPECT_EQ(transition(incubating("n", "a"), S::Activated).state, S::Activated);
}

TEST(Responses, LatestTimestampWinsAndTiesGoToLaterEntry) {
  std::vector<InterestResponse> rs = {resp("n", "b", Choice::Interested, 5), resp("n", "b", Choice::NotForMe, 1),
                                      resp("n", "c", Choice::NotForMe, 3), resp("n", "c", Choice::Interested, 3)};
  auto finals = final_choices(rs);
  EXPECT_EQ(finals.at(UserId("b")).choice, Choice::Interested);
  EXPECT_EQ(finals.at(UserId("c")).choice, Choice::Interested);
}

TEST(Responses, RecordChecksInOrder) {
  const auto s = ny();
  Nook n = incubating("n", "a", {UserId("x")});
  const Instant evening = local(kNewYork, kMonday, 18);
  auto code = [&](const Nook& nook, const std::string& user, Instant at, bool onboarded) {
    try {
      record_response(nook, UserId(user), Choice::Interested, at, s, onboarded);
    } catch (const NooksError& e) {
      return e.code();
    }
    return ErrorCode::ParseError;  // sentinel: accepted
  };
  EXPECT_EQ(code(n, "x", evening, false), ErrorCode::NotOnboarded);
  EXPECT_EQ(code(n, "x", evening, true), ErrorCode::ExcludedUser);
  Nook queued = n;
  queued.state = NookState::Queued;
  EXPECT_EQ(code(queued, "b", evening, true), ErrorCode::NotIncubating);
  EXPECT_EQ(code(n, "b", activation_at(kMonday, s), true), ErrorCode::ResponseWindowClosed);
  EXPECT_EQ(code(n, "b", activation_at(kMonday, s) - Duration(1), true), ErrorCode::ParseError);
}

TEST(Cards, OnlyIncubatingAndNotExcluded) {
  std::vector<Nook> nooks = {incubating("nk-0002", "a"), incubating("nk-0001", "a", {UserId("x")}),
                             incubating("nk-0003", "b")};
  nooks[2].state = NookState::Queued;
  auto for_x = visible_cards(UserId("x"), nooks);
  ASSERT_EQ(for_x.size(), 1u);
  EXPECT_EQ(for_x[0].nook_id.str(), "nk-0002");
  auto for_y = visible_cards(UserId("y"), nooks);
  ASSERT_EQ(for_y.size(), 2u);
  EXPECT_EQ(for_y[0].nook_id.str(), "nk-0001");  // same created_at: id order
}

TEST(Cards, CanonicalSerialization) {
  NookCard c{NookId("nk-0001"), "mystery novels", "Let's \"swap\" books"};
  EXPECT_EQ(serialize_card(c),
            R"({"initial_thoughts":"Let's \"swap\" books","nook_id":"nk-0001","topic":"mystery novels"})");
}

TEST(MemberSet, TwoOthersThreshold) {
  const auto s = ny();
  Nook n = incubating("n", "a", {}, true);
  std::vector<InterestResponse> one = {resp("n", "b", Choice::Interested, 1)};
  EXPECT_EQ(compute_member_set(n, one, s), ActivationDecision(NotActivated{NotActivatedReason::InsufficientOthers}));
  std::vector<InterestResponse> two = {resp("n", "b", Choice::Interested, 1), resp("n", "c", Choice::Interested, 2)};
  EXPECT_EQ(compute_member_set(n, two, s), ActivationDecision(Activate{{UserId("a"), UserId("b"), UserId("c")}}));
}

TEST(MemberSet, MinimumMembersAndCreatorOptOut) {
  const auto s = ny();
  Nook n = incubating("n", "a");
  EXPECT_EQ(compute_member_set(n, {}, s), ActivationDecision(NotActivated{NotActivatedReason::TooFewMembers}));
  std::vector<InterestResponse> rs = {resp("n", "b", Choice::Interested, 1)};
  EXPECT_EQ(compute_member_set(n, rs, s), ActivationDecision(Activate{{UserId("a"), UserId("b")}}));
  rs.push_back(resp("n", "a", Choice::NotForMe, 2));
  EXPECT_EQ(compute_member_set(n, rs, s), ActivationDecision(NotActivated{NotActivatedReason::TooFewMembers}));
}

TEST(MemberSet, PredefinedHasNoCreatorMember) {
  const auto s = ny();
  Nook n = incubating("n", kSystemCreator.str());
  n.origin = NookOrigin::Predefined;
  std::vector<InterestResponse> rs = {resp("n", "b", Choice::Interested, 1), resp("n", "c", Choice::Interested, 1)};
  EXPECT_EQ(compute_member_set(n, rs, s), ActivationDecision(Activate{{UserId("b"), UserId("c")}}));
}

TEST(Greeting, MatchesPublishedMessage) {
  Nook n = incubating("n", "a");
  n.draft.topic = "fireworks and other Insta-worthy images";
  n.draft.initial_thoughts = "Share images of your fun July 4th activities!";
  EXPECT_EQ(greeting_message(n, ny()),
            "Super-excited to hear all of your thoughts on fireworks and other Insta-worthy images. Share images of "
            "your fun July 4th activities! Remember this chat will be automatically archived at 12PM tomorrow");
}

TEST(Greeting, EmptyThoughtsLeaveNoDoubleSpace) {
  Nook n = incubating("n", "a");
  n.draft.topic = "What is your idea of fun?";
  n.draft.initial_thoughts = "";
  const std::string g = greeting_message(n, ny());
  EXPECT_EQ(g, "Super-excited to hear all of your thoughts on What is your idea of fun?. Remember this chat will be "
               "automatically archived at 12PM tomorrow");
  EXPECT_EQ(g.find("  "), std::string::npos);
}

TEST(Greeting, OtherLifetimesNameTheDay) {
  Nook n = incubating("n", "a");
  auto s = ny();
  s.channel_lifetime = std::chrono::hours(4);
  EXPECT_NE(greeting_message(n, s).find("archived at 4PM today"), std::string::npos);
  s.channel_lifetime = std::chrono::hours(48) + std::chrono::minutes(30);
  EXPECT_NE(greeting_message(n, s).find("archived at 12:30PM on 2024-03-07"), std::string::npos);
}

TEST(Clock12h, Formats) {
  using std::chrono::hours;
  using std::chrono::minutes;
  EXPECT_EQ(format_clock_12h(hours(12)), "12PM");
  EXPECT_EQ(format_clock_12h(hours(0)), "12AM");
  EXPECT_EQ(format_clock_12h(hours(9) + minutes(30)), "9:30AM");
  EXPECT_EQ(format_clock_12h(hours(23) + minutes(5)), "11:05PM");
}

TEST(Notification, VerbatimText) {
  EXPECT_EQ(kBatchNotification,
            "Hello! I've updated your Nook Cards List for today. Head over to the Nooks Home Tab to see the cards "
            "for today!");
}

TEST(Encounters, CountsSharedNooks) {
  const UserId u1("u1"), u2("u2"), u3("u3");
  EncounterHistory h = {{NookId("n1"), {u1, u2, u3}}, {NookId("n2"), {u1, u2}}};
  auto counts = encounter_counts(h, u1);
  EXPECT_EQ(counts, (std::map<UserId, int>{{u2, 2}, {u3, 1}}));
  EXPECT_EQ(top_encounters(h, u1, 10), (std::vector<Encounter>{{u2, 2}, {u3, 1}}));
  EXPECT_EQ(top_encounters(h, u1, 1), (std::vector<Encounter>{{u2, 2}}));
  EXPECT_TRUE(top_encounters(h, UserId("nobody"), 10).empty());
}

TEST(Encounters, TiesByUserId) {
  const UserId a("a"), b("b"), c("c");
  EncounterHistory h = {{NookId("n1"), {a, c}}, {NookId("n2"), {a, b}}};
  EXPECT_EQ(top_encounters(h, a, 10), (std::vector<Encounter>{{b, 1}, {c, 1}}));
}

TEST(Samples, PagesWrapRoundRobin) {
  auto all = default_samples();
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(sample_nooks(0, all), (std::vector<SampleNook>{all[0], all[1]}));
  EXPECT_EQ(sample_nooks(1, all), (std::vector<SampleNook>{all[2], all[3]}));
  EXPECT_EQ(sample_nooks(2, all), (std::vector<SampleNook>{all[4], all[0]}));
  std::vector<SampleNook> one = {all[0]};
  EXPECT_EQ(sample_nooks(7, one), one);
  EXPECT_TRUE(sample_nooks(3, std::vector<SampleNook>{}).empty());
}

TEST(Samples, DefaultsIncludePublishedExamples) {
  auto all = default_samples();
  EXPECT_EQ(all[0], (SampleNook{"Is anyone else also watching the match tonight", "Let's meet"}));
  EXPECT_EQ(all[1], (SampleNook{"Let's plan an activity for the weekend", "Museums, parks, food?"}));
}

TEST(Types, DurationsRoundTrip) {
  EXPECT_EQ(parse_duration("24h"), Duration(86400));
  EXPECT_EQ(parse_duration("1d2h3m4s"), Duration(93784));
  EXPECT_EQ(parse_duration("90"), Duration(90));
  EXPECT_FALSE(parse_duration("").has_value());
  EXPECT_FALSE(parse_duration("5x").has_value());
  EXPECT_FALSE(parse_duration("h").has_value());
  EXPECT_EQ(format_duration(std::chrono::hours(48)), "2d");
  EXPECT_EQ(format_duration(Duration(61)), "61s");
}

TEST(Types, InstantsAndDatesRoundTrip) {
  const Instant t = testing::utc(kMonday, 21, 5, 9);
  EXPECT_EQ(format_instant(t), "2024-03-04T21:05:09Z");
  EXPECT_EQ(parse_instant("2024-03-04T21:05:09Z"), t);
  EXPECT_FALSE(parse_instant("2024-02-30T00:00:00Z").has_value());
  EXPECT_EQ(parse_date("2024-02-29"), ymd(2024, 2, 29));
  EXPECT_FALSE(parse_time_of_day("24:00").has_value());
}

}  // namespace
}  // namespace nooks
