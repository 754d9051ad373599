#include "nooks/domain/nook.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace nooks {
namespace {

constexpr std::array<std::pair<NookState, std::string_view>, 6> kStateNames{{
    {NookState::Queued, "Queued"},
    {NookState::Incubating, "Incubating"},
    {NookState::Activated, "Activated"},
    {NookState::NotActivated, "NotActivated"},
    {NookState::Archived, "Archived"},
    {NookState::Persistent, "Persistent"},
}};

bool is_title_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-';
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

}  // namespace

std::string_view to_string(NookState s) {
  for (const auto& [state, name] : kStateNames) {
    if (state == s) return name;
  }
  return "Unknown";
}

std::optional<NookState> parse_nook_state(std::string_view s) {
  for (const auto& [state, name] : kStateNames) {
    if (name == s) return state;
  }
  return std::nullopt;
}

std::string_view to_string(NotActivatedReason r) {
  return r == NotActivatedReason::InsufficientOthers ? "InsufficientOthers" : "TooFewMembers";
}

std::optional<NotActivatedReason> parse_not_activated_reason(std::string_view s) {
  if (s == "InsufficientOthers") return NotActivatedReason::InsufficientOthers;
  if (s == "TooFewMembers") return NotActivatedReason::TooFewMembers;
  return std::nullopt;
}

std::string_view to_string(NookOrigin o) { return o == NookOrigin::Member ? "member" : "predefined"; }

std::optional<NookOrigin> parse_nook_origin(std::string_view s) {
  if (s == "member") return NookOrigin::Member;
  if (s == "predefined") return NookOrigin::Predefined;
  return std::nullopt;
}

bool is_valid_transition(NookState from, NookState to) {
  switch (from) {
    case NookState::Queued: return to == NookState::Incubating;
    case NookState::Incubating: return to == NookState::Activated || to == NookState::NotActivated;
    case NookState::Activated: return to == NookState::Archived;
    case NookState::Archived: return to == NookState::Persistent;
    case NookState::NotActivated:
    case NookState::Persistent: return false;
  }
  return false;
}

Nook transition(Nook nook, NookState to) {
  if (!is_valid_transition(nook.state, to)) {
    throw NooksError(ErrorCode::CorruptState, "illegal nook transition " + std::string(to_string(nook.state)) +
                                                  " -> " + std::string(to_string(to)) + " for " + nook.id.str());
  }
  nook.state = to;
  return nook;
}

std::vector<ValidationError> validate_channel_title(std::string_view title) {
  std::vector<ValidationError> errors;
  if (title.empty()) {
    errors.push_back({"channel_title", ErrorCode::EmptyTitle});
    return errors;
  }
  if (title.size() >= kMaxChannelTitleLength) errors.push_back({"channel_title", ErrorCode::TitleTooLong});
  if (!std::all_of(title.begin(), title.end(), is_title_char)) {
    errors.push_back({"channel_title", ErrorCode::TitleBadCharset});
  }
  return errors;
}

std::vector<ValidationError> validate_draft(const NookDraft& draft, const UserSet& roster) {
  std::vector<ValidationError> errors;
  if (is_blank(draft.topic)) errors.push_back({"topic", ErrorCode::EmptyTopic});
  auto title_errors = validate_channel_title(draft.channel_title);
  errors.insert(errors.end(), title_errors.begin(), title_errors.end());
  if (draft.excluded.contains(draft.creator)) errors.push_back({"excluded", ErrorCode::SelfExclusion});
  for (const auto& u : draft.excluded) {
    if (u != draft.creator && !roster.contains(u)) {
      errors.push_back({"excluded", ErrorCode::UnknownExcludedUser});
      break;
    }
  }
  return errors;
}

}  // namespace nooks
