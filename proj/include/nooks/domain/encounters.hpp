#pragma once

#include <map>
#include <span>
#include <vector>

#include "nooks/domain/types.hpp"

namespace nooks {

struct EncounterEntry {
  NookId nook_id;
  UserSet members;
};

using EncounterHistory = std::vector<EncounterEntry>;

/// Number of shared nooks between `user` and every other member; zero counts
/// are omitted.
std::map<UserId, int> encounter_counts(std::span<const EncounterEntry> history, const UserId& user);

struct Encounter {
  UserId user;
  int count = 0;
  bool operator==(const Encounter&) const = default;
};

/// The `k` most frequent co-members, count descending then UserId ascending.
std::vector<Encounter> top_encounters(std::span<const EncounterEntry> history, const UserId& user,
                                      std::size_t k);

}  // namespace nooks
