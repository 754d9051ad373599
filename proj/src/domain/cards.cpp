#include "nooks/domain/cards.hpp"

#include <algorithm>

#include <json.hpp>

namespace nooks {

std::vector<NookCard> visible_cards(const UserId& viewer, std::span<const Nook> batch) {
  std::vector<const Nook*> shown;
  for (const auto& n : batch) {
    if (n.state == NookState::Incubating && !n.excludes(viewer)) shown.push_back(&n);
  }
  std::sort(shown.begin(), shown.end(), [](const Nook* a, const Nook* b) {
    if (a->created_at != b->created_at) return a->created_at < b->created_at;
    return a->id < b->id;
  });
  std::vector<NookCard> cards;
  cards.reserve(shown.size());
  for (const Nook* n : shown) cards.push_back({n->id, n->draft.topic, n->draft.initial_thoughts});
  return cards;
}

std::string serialize_card(const NookCard& card) {
  nlohmann::json j{{"nook_id", card.nook_id.str()},
                   {"topic", card.topic},
                   {"initial_thoughts", card.initial_thoughts}};
  return j.dump();
}

}  // namespace nooks
