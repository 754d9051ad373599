#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "nooks/domain/nook.hpp"
#include "nooks/domain/schedule.hpp"

namespace nooks {

enum class Choice { Interested, NotForMe };

std::string_view to_string(Choice c);              // "interested" / "not_for_me"
std::optional<Choice> parse_choice(std::string_view s);

struct InterestResponse {
  NookId nook_id;
  UserId user_id;
  Choice choice = Choice::Interested;
  Instant responded_at{};

  bool operator==(const InterestResponse&) const = default;
};

/// Effective response per user: the one with the latest `responded_at`; among
/// equal timestamps the one appearing later in `responses` wins.
std::map<UserId, InterestResponse> final_choices(std::span<const InterestResponse> responses);

/// Checks that `user` may respond to `nook` at `now` and returns the response
/// to record. `onboarded` is true when the user is an onboarded, consented
/// member. Errors: NotOnboarded, ExcludedUser, NotIncubating,
/// ResponseWindowClosed.
InterestResponse record_response(const Nook& nook, const UserId& user, Choice choice, Instant now,
                                 const ScheduleConfig& schedule, bool onboarded);

/// Applies `response` to an effective-response map using last-write-wins.
void apply_response(std::map<UserId, InterestResponse>& effective, const InterestResponse& response);

}  // namespace nooks
