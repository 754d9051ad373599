#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nooks/domain/nook.hpp"
#include "nooks/domain/responses.hpp"
#include "nooks/domain/samples.hpp"
#include "nooks/domain/schedule.hpp"

namespace nooks::events {

// Every payload declares whether it may carry chat message text. None may;
// the static_assert below and the runtime key scan in EventLog::append both
// enforce it.

struct MemberInvited {
  static constexpr bool kCarriesMessageBody = false;
  UserId user;
  std::string invite_code;
};

struct MemberOnboarded {
  static constexpr bool kCarriesMessageBody = false;
  MemberProfile profile;  // consented is recorded separately
};

struct ConsentRecorded {
  static constexpr bool kCarriesMessageBody = false;
  UserId user;
};

struct NookCreated {
  static constexpr bool kCarriesMessageBody = false;
  NookId nook_id;
  NookDraft draft;
  NookOrigin origin = NookOrigin::Member;
  Instant created_at{};
  LocalDate batch_date{};
  std::string seed_marker;  // predefined nooks only
};

struct ResponseRecorded {
  static constexpr bool kCarriesMessageBody = false;
  InterestResponse response;
};

struct BatchOpened {
  static constexpr bool kCarriesMessageBody = false;
  LocalDate batch_date{};
  std::vector<NookId> nooks;
};

struct NookActivated {
  static constexpr bool kCarriesMessageBody = false;
  NookId nook_id;
  std::string channel_handle;
  std::string channel_name;
  UserSet members;
  Instant activated_at{};
  Instant archive_due_at{};
};

struct NookNotActivated {
  static constexpr bool kCarriesMessageBody = false;
  NookId nook_id;
  NotActivatedReason reason = NotActivatedReason::TooFewMembers;
  Instant decided_at{};
};

struct ChannelArchived {
  static constexpr bool kCarriesMessageBody = false;
  NookId nook_id;
  Instant archived_at{};
};

struct ChannelUnarchived {
  static constexpr bool kCarriesMessageBody = false;
  NookId nook_id;
  UserId requester;
};

struct MemberAddedToChannel {
  static constexpr bool kCarriesMessageBody = false;
  NookId nook_id;
  UserId inviter;
  UserId invitee;
};

struct ConfigChanged {
  static constexpr bool kCarriesMessageBody = false;
  std::optional<std::string> workspace_id;  // set once, at install
  std::optional<UserId> admin;
  std::optional<ScheduleConfig> schedule;
  std::optional<std::vector<SampleNook>> samples;
};

using Payload = std::variant<MemberInvited, MemberOnboarded, ConsentRecorded, NookCreated, ResponseRecorded,
                             BatchOpened, NookActivated, NookNotActivated, ChannelArchived, ChannelUnarchived,
                             MemberAddedToChannel, ConfigChanged>;

template <typename Variant>
struct AllMessageFree;
template <typename... Ts>
struct AllMessageFree<std::variant<Ts...>> : std::bool_constant<(!Ts::kCarriesMessageBody && ...)> {};
static_assert(AllMessageFree<Payload>::value, "log payloads must never carry chat message text");

/// Name of the payload variant, e.g. "NookCreated".
std::string_view payload_type(const Payload& p);
std::vector<std::string_view> all_payload_types();

}  // namespace nooks::events

namespace nooks {

struct LogEvent {
  std::uint64_t sequence = 0;
  Instant occurred_at{};
  events::Payload payload;
};

nlohmann::json to_json(const LogEvent& e);
LogEvent log_event_from_json(const nlohmann::json& j);  // throws ParseError

nlohmann::json schedule_to_json(const ScheduleConfig& s);
ScheduleConfig schedule_from_json(const nlohmann::json& j);

/// Field names that would indicate message content in a serialized payload.
bool contains_message_body_field(const nlohmann::json& j);

}  // namespace nooks
