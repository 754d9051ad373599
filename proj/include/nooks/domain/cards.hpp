#pragma once

#include <span>
#include <string>
#include <vector>

#include "nooks/domain/nook.hpp"

namespace nooks {

/// What a member sees of an incubating nook. Deliberately nothing else: no
/// creator, no counts, no respondents.
struct NookCard {
  NookId nook_id;
  std::string topic;
  std::string initial_thoughts;

  bool operator==(const NookCard&) const = default;
};

/// Cards of the incubating nooks in `batch` that `viewer` is not excluded
/// from, ordered by creation time then nook id.
std::vector<NookCard> visible_cards(const UserId& viewer, std::span<const Nook> batch);

/// Canonical serialization: {"initial_thoughts":..,"nook_id":..,"topic":..}.
std::string serialize_card(const NookCard& card);

}  // namespace nooks
