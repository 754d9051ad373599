#include "nooks/domain/encounters.hpp"

#include <algorithm>

namespace nooks {

std::map<UserId, int> encounter_counts(std::span<const EncounterEntry> history, const UserId& user) {
  std::map<UserId, int> counts;
  for (const auto& entry : history) {
    if (!entry.members.contains(user)) continue;
    for (const auto& other : entry.members) {
      if (other != user) ++counts[other];
    }
  }
  return counts;
}

std::vector<Encounter> top_encounters(std::span<const EncounterEntry> history, const UserId& user,
                                      std::size_t k) {
  std::vector<Encounter> ranked;
  for (const auto& [other, count] : encounter_counts(history, user)) ranked.push_back({other, count});
  // map iteration already yields ascending UserId; stable sort keeps it for ties
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Encounter& a, const Encounter& b) { return a.count > b.count; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace nooks
