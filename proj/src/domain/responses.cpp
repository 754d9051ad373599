#include "nooks/domain/responses.hpp"

namespace nooks {

std::string_view to_string(Choice c) { return c == Choice::Interested ? "interested" : "not_for_me"; }

std::optional<Choice> parse_choice(std::string_view s) {
  if (s == "interested") return Choice::Interested;
  if (s == "not_for_me") return Choice::NotForMe;
  return std::nullopt;
}

void apply_response(std::map<UserId, InterestResponse>& effective, const InterestResponse& response) {
  auto it = effective.find(response.user_id);
  if (it == effective.end()) {
    effective.emplace(response.user_id, response);
  } else if (response.responded_at >= it->second.responded_at) {
    it->second = response;
  }
}

std::map<UserId, InterestResponse> final_choices(std::span<const InterestResponse> responses) {
  std::map<UserId, InterestResponse> effective;
  for (const auto& r : responses) apply_response(effective, r);
  return effective;
}

InterestResponse record_response(const Nook& nook, const UserId& user, Choice choice, Instant now,
                                 const ScheduleConfig& schedule, bool onboarded) {
  if (!onboarded) throw NooksError(ErrorCode::NotOnboarded);
  if (nook.excludes(user)) throw NooksError(ErrorCode::ExcludedUser);
  if (nook.state != NookState::Incubating) throw NooksError(ErrorCode::NotIncubating);
  if (now >= activation_at(nook.batch_date, schedule)) throw NooksError(ErrorCode::ResponseWindowClosed);
  return InterestResponse{nook.id, user, choice, now};
}

}  // namespace nooks
