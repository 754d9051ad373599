#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nooks/domain/errors.hpp"
#include "nooks/domain/types.hpp"

namespace nooks {

inline constexpr std::size_t kMaxChannelTitleLength = 60;

/// Synthetic creator of administrator-seeded nooks. Never shown and never
/// added to a channel.
inline const UserId kSystemCreator{"nooks-system"};

struct NookDraft {
  UserId creator;
  std::string topic;
  std::string initial_thoughts;
  std::string channel_title;
  UserSet excluded;
  bool require_two_others = false;

  bool operator==(const NookDraft&) const = default;
};

enum class NookState { Queued, Incubating, Activated, NotActivated, Archived, Persistent };
enum class NotActivatedReason { InsufficientOthers, TooFewMembers };
enum class NookOrigin { Member, Predefined };

std::string_view to_string(NookState s);
std::string_view to_string(NotActivatedReason r);
std::string_view to_string(NookOrigin o);
std::optional<NookState> parse_nook_state(std::string_view s);
std::optional<NotActivatedReason> parse_not_activated_reason(std::string_view s);
std::optional<NookOrigin> parse_nook_origin(std::string_view s);

struct Nook {
  NookId id;
  NookDraft draft;
  Instant created_at{};
  LocalDate batch_date{};
  NookState state = NookState::Queued;
  std::optional<NotActivatedReason> not_activated_reason;
  NookOrigin origin = NookOrigin::Member;

  const UserId& creator() const { return draft.creator; }
  bool excludes(const UserId& u) const { return draft.excluded.contains(u); }

  bool operator==(const Nook&) const = default;
};

/// The lifecycle edge set: Queued -> Incubating -> {Activated, NotActivated},
/// Activated -> Archived -> Persistent.
bool is_valid_transition(NookState from, NookState to);

/// Returns `nook` moved to `to`; throws CorruptState on an illegal edge.
Nook transition(Nook nook, NookState to);

struct ValidationError {
  std::string field;
  ErrorCode code;

  bool operator==(const ValidationError&) const = default;
};

/// Channel titles are ASCII letters of either case plus '-', shorter than 60
/// characters.
std::vector<ValidationError> validate_channel_title(std::string_view title);

/// Empty result means the draft is acceptable. `roster` is the set of
/// consented, onboarded members.
std::vector<ValidationError> validate_draft(const NookDraft& draft, const UserSet& roster);

}  // namespace nooks
