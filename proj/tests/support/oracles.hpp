#pragma once

// Brute-force reference implementations. Deliberately naive and written
// without the library's helpers so a shared bug cannot hide.

#include <absl/time/time.h>

#include <algorithm>
#include <map>
#include <vector>

#include "nooks/domain/activation.hpp"
#include "nooks/domain/encounters.hpp"

namespace nooks::oracle {

/// Batch date by reading the wall clock directly from the tz database.
inline LocalDate batch_for(Instant t, const ScheduleConfig& s) {
  absl::TimeZone tz;
  absl::LoadTimeZone(s.timezone, &tz);
  const absl::CivilSecond cs = absl::ToCivilSecond(absl::FromUnixSeconds(t.time_since_epoch().count()), tz);
  const long wall = cs.hour() * 3600L + cs.minute() * 60L + cs.second();
  const long cutoff = s.batch_cutoff.hour * 3600L + s.batch_cutoff.minute * 60L + s.batch_cutoff.second;
  absl::CivilDay day(cs);
  if (wall >= cutoff) day += 1;
  return LocalDate{std::chrono::year(static_cast<int>(day.year())), std::chrono::month(static_cast<unsigned>(day.month())),
                   std::chrono::day(static_cast<unsigned>(day.day()))};
}

/// Scans every response per user; the later timestamp wins, and on equal
/// timestamps the one with the larger index.
inline ActivationDecision member_set(const Nook& nook, const std::vector<InterestResponse>& responses,
                                     const ScheduleConfig& s) {
  std::vector<UserId> users;
  for (const auto& r : responses) {
    if (std::find(users.begin(), users.end(), r.user_id) == users.end()) users.push_back(r.user_id);
  }
  std::map<UserId, Choice> final_choice;
  for (const auto& u : users) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(responses.size()); ++i) {
      const auto& r = responses[static_cast<std::size_t>(i)];
      if (r.user_id != u) continue;
      if (best < 0 || r.responded_at >= responses[static_cast<std::size_t>(best)].responded_at) best = i;
    }
    final_choice[u] = responses[static_cast<std::size_t>(best)].choice;
  }

  const bool real_creator = nook.origin == NookOrigin::Member;
  UserSet members;
  for (const auto& [u, c] : final_choice) {
    if (c == Choice::Interested && !nook.draft.excluded.contains(u)) members.insert(u);
  }
  if (real_creator) {
    auto it = final_choice.find(nook.draft.creator);
    if (it != final_choice.end() && it->second == Choice::NotForMe) {
      members.erase(nook.draft.creator);
    } else {
      members.insert(nook.draft.creator);
    }
  }
  int others = 0;
  for (const auto& m : members) {
    if (!(real_creator && m == nook.draft.creator)) ++others;
  }
  if (nook.draft.require_two_others && others < 2) return NotActivated{NotActivatedReason::InsufficientOthers};
  if (static_cast<int>(members.size()) < s.min_members_to_activate) {
    return NotActivated{NotActivatedReason::TooFewMembers};
  }
  return Activate{members};
}

/// Pairwise co-membership over every user that appears anywhere.
inline std::vector<Encounter> top_encounters(const EncounterHistory& history, const UserId& user, std::size_t k) {
  std::vector<UserId> everyone;
  for (const auto& e : history) {
    for (const auto& m : e.members) {
      if (std::find(everyone.begin(), everyone.end(), m) == everyone.end()) everyone.push_back(m);
    }
  }
  std::vector<Encounter> all;
  for (const auto& other : everyone) {
    if (other == user) continue;
    int n = 0;
    for (const auto& e : history) {
      bool has_user = false, has_other = false;
      for (const auto& m : e.members) {
        has_user = has_user || m == user;
        has_other = has_other || m == other;
      }
      if (has_user && has_other) ++n;
    }
    if (n > 0) all.push_back({other, n});
  }
  std::sort(all.begin(), all.end(), [](const Encounter& a, const Encounter& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.user.str() < b.user.str();
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace nooks::oracle
