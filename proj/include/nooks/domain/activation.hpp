#pragma once

#include <span>
#include <string>
#include <variant>

#include "nooks/domain/nook.hpp"
#include "nooks/domain/responses.hpp"
#include "nooks/domain/schedule.hpp"

namespace nooks {

struct Activate {
  UserSet members;
  bool operator==(const Activate&) const = default;
};

struct NotActivated {
  NotActivatedReason reason;
  bool operator==(const NotActivated&) const = default;
};

using ActivationDecision = std::variant<Activate, NotActivated>;

/// Decides who joins `nook` at its activation instant.
///
/// Members are everyone whose final choice is Interested, plus the creator
/// unless the creator's own final choice is NotForMe. Predefined nooks have no
/// real creator to add. With require_two_others, fewer than two non-creator
/// members gives InsufficientOthers; fewer than min_members_to_activate gives
/// TooFewMembers. Excluded users never appear in the result.
ActivationDecision compute_member_set(const Nook& nook, std::span<const InterestResponse> responses,
                                      const ScheduleConfig& schedule);

/// "12PM", "9:30AM", "12AM".
std::string format_clock_12h(std::chrono::seconds since_midnight);

/// First bot post in an activated nook's channel. Never mentions the creator.
std::string greeting_message(const Nook& nook, const ScheduleConfig& schedule);

inline constexpr std::string_view kBatchNotification =
    "Hello! I've updated your Nook Cards List for today. Head over to the Nooks Home Tab to see "
    "the cards for today!";

/// Private notice to the creator of a nook that did not launch.
std::string not_activated_notice(const Nook& nook, NotActivatedReason reason);

/// Direct message sent to each member when a nook channel is archived.
std::string archive_notice(const std::string& channel_name);

/// Direct message carrying a sign-up invite code.
std::string invite_message(const std::string& invite_code);

}  // namespace nooks
