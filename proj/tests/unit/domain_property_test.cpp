#include <gtest/gtest.h>

#include <json.hpp>

#include "nooks/domain/activation.hpp"
#include "nooks/domain/cards.hpp"
#include "nooks/domain/encounters.hpp"
#include "nooks/domain/samples.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace nooks {
namespace {

using testing::Gen;
using testing::ymd;

const std::vector<std::string> kZones = {"UTC", "America/New_York", "Europe/Berlin", "Asia/Kolkata",
                                         "Australia/Lord_Howe", "America/Sao_Paulo"};

ScheduleConfig random_schedule(Gen& g) {
  ScheduleConfig s;
  s.timezone = g.pick(kZones);
  s.batch_cutoff = {g.uniform(0, 23), g.coin() ? 0 : g.uniform(0, 59), 0};
  do {
    s.activation_time = {g.uniform(0, 23), g.coin() ? 0 : g.uniform(0, 59), 0};
  } while (s.activation_time == s.batch_cutoff);
  s.channel_lifetime = std::chrono::hours(g.uniform(1, 72));
  s.min_members_to_activate = g.uniform(1, 4);
  return s;
}

Instant random_instant(Gen& g) {
  // 2023-01-01 .. 2026-01-01, includes several DST changes per zone.
  return Instant(std::chrono::seconds(1672531200LL + g.uniform(0, 3 * 365 * 86400)));
}

TEST(BatchProperty, MatchesWallClockOracle) {
  Gen g(101);
  for (int i = 0; i < 5000; ++i) {
    const ScheduleConfig s = random_schedule(g);
    const Instant t = random_instant(g);
    ASSERT_EQ(assign_batch(t, s), oracle::batch_for(t, s)) << format_instant(t) << " " << s.timezone;
  }
}

TEST(BatchProperty, IncubationAlwaysOpensAfterCreation) {
  Gen g(102);
  for (int i = 0; i < 5000; ++i) {
    const ScheduleConfig s = random_schedule(g);
    const Instant t = random_instant(g);
    const LocalDate b = assign_batch(t, s);
    ASSERT_GT(incubation_opens_at(b, s), t);
    ASSERT_LT(incubation_opens_at(b, s), activation_at(b, s) + std::chrono::hours(24));
    // Monotone: later creation never lands in an earlier batch.
    const Instant later = t + Duration(g.uniform(0, 200000));
    ASSERT_LE(b, assign_batch(later, s));
  }
}

TEST(MemberSetProperty, AgreesWithOracle) {
  Gen g(103);
  const auto users = testing::user_ids(8);
  for (int i = 0; i < 2000; ++i) {
    ScheduleConfig s;
    s.min_members_to_activate = g.uniform(1, 4);
    Nook n;
    n.id = NookId("n");
    n.origin = g.coin(0.2) ? NookOrigin::Predefined : NookOrigin::Member;
    n.draft.creator = n.origin == NookOrigin::Predefined ? kSystemCreator : g.pick(users);
    n.draft.excluded = g.subset(users, 0.15);
    n.draft.excluded.erase(n.draft.creator);
    n.draft.require_two_others = g.coin(0.3);
    std::vector<InterestResponse> rs;
    const int count = g.uniform(0, 20);
    for (int r = 0; r < count; ++r) {
      rs.push_back({n.id, g.pick(users), g.coin() ? Choice::Interested : Choice::NotForMe,
                    Instant(std::chrono::seconds(g.uniform(0, 5)))});
    }
    const auto got = compute_member_set(n, rs, s);
    ASSERT_EQ(got, oracle::member_set(n, rs, s));
    if (auto* a = std::get_if<Activate>(&got)) {
      for (const auto& u : a->members) ASSERT_FALSE(n.excludes(u));
    }
  }
}

TEST(ResponseProperty, OrderOfDistinctTimestampsDoesNotMatter) {
  Gen g(104);
  const auto users = testing::user_ids(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<InterestResponse> rs;
    for (int r = 0; r < 12; ++r) {
      rs.push_back({NookId("n"), g.pick(users), g.coin() ? Choice::Interested : Choice::NotForMe,
                    Instant(std::chrono::seconds(r))});
    }
    auto expected = final_choices(rs);
    std::shuffle(rs.begin(), rs.end(), g.engine());
    ASSERT_EQ(final_choices(rs), expected);
  }
}

TEST(CardProperty, IdenticalForEveryViewerAndExactlyThreeFields) {
  Gen g(105);
  const auto users = testing::user_ids(10);
  for (int i = 0; i < 300; ++i) {
    std::vector<Nook> nooks;
    for (int k = 0; k < g.uniform(1, 6); ++k) {
      Nook n;
      char id[16];
      std::snprintf(id, sizeof id, "nk-%04d", k + 1);
      n.id = NookId(id);
      n.draft = NookDraft{g.pick(users), g.sentence(3), g.sentence(g.uniform(0, 6)), "t", g.subset(users, 0.2), false};
      n.draft.excluded.erase(n.draft.creator);
      n.state = g.coin(0.8) ? NookState::Incubating : NookState::Queued;
      nooks.push_back(n);
    }
    std::map<std::string, std::string> seen;  // nook -> serialized card
    for (const auto& viewer : users) {
      for (const auto& card : visible_cards(viewer, nooks)) {
        const std::string bytes = serialize_card(card);
        auto [it, fresh] = seen.emplace(card.nook_id.str(), bytes);
        ASSERT_EQ(it->second, bytes);
        auto j = nlohmann::json::parse(bytes);
        ASSERT_EQ(j.size(), 3u);
        ASSERT_TRUE(j.contains("nook_id") && j.contains("topic") && j.contains("initial_thoughts"));
      }
    }
  }
}

TEST(GreetingProperty, NeverNamesTheCreator) {
  Gen g(106);
  for (int i = 0; i < 1000; ++i) {
    Nook n;
    n.draft.creator = UserId("creator-" + g.word(6, 6));
    n.draft.topic = g.sentence(g.uniform(1, 6));
    n.draft.initial_thoughts = g.coin(0.3) ? "" : g.sentence(g.uniform(1, 10));
    n.batch_date = ymd(2024, 1, 1);
    const ScheduleConfig s = random_schedule(g);
    const std::string text = greeting_message(n, s);
    ASSERT_EQ(text.find(n.draft.creator.str()), std::string::npos);
    ASSERT_EQ(text.find("  "), std::string::npos);
  }
}

TEST(EncounterProperty, SymmetricAndMatchesOracle) {
  Gen g(107);
  const auto users = testing::user_ids(12);
  for (int i = 0; i < 300; ++i) {
    EncounterHistory h;
    for (int k = 0; k < g.uniform(0, 15); ++k) h.push_back({NookId("n" + std::to_string(k)), g.subset(users, 0.4)});
    for (const auto& u : users) {
      ASSERT_EQ(top_encounters(h, u, 5), oracle::top_encounters(h, u, 5));
      for (const auto& [other, count] : encounter_counts(h, u)) ASSERT_EQ(encounter_counts(h, other).at(u), count);
    }
  }
}

TEST(SampleProperty, ConsecutivePagesCoverEverySample) {
  for (std::size_t n = 1; n <= 9; ++n) {
    std::vector<SampleNook> all;
    for (std::size_t i = 0; i < n; ++i) all.push_back({"topic " + std::to_string(i), ""});
    for (std::size_t start = 0; start < 4; ++start) {
      std::set<std::string> seen;
      for (std::size_t p = start; p < start + (n + 1) / 2; ++p) {
        auto page = sample_nooks(p, all);
        ASSERT_EQ(page.size(), std::min<std::size_t>(2, n));
        for (const auto& s : page) seen.insert(s.topic);
      }
      ASSERT_EQ(seen.size(), n) << "n=" << n << " start=" << start;
    }
  }
}

TEST(TitleProperty, AcceptsExactlyShortLetterDashStrings) {
  Gen g(108);
  const std::string alphabet = "abcXYZ- _9.\xc3\xa9";
  for (int i = 0; i < 3000; ++i) {
    std::string t;
    const int len = g.uniform(0, 70);
    for (int k = 0; k < len; ++k) t += alphabet[static_cast<std::size_t>(g.uniform(0, static_cast<int>(alphabet.size()) - 1))];
    bool ok = !t.empty() && t.size() < 60;
    for (unsigned char c : t) ok = ok && (std::isalpha(c) && c < 0x80 ? true : c == '-');
    ASSERT_EQ(validate_channel_title(t).empty(), ok) << t;
  }
}

}  // namespace
}  // namespace nooks
