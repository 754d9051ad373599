#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nooks/domain/encounters.hpp"
#include "nooks/domain/nook.hpp"
#include "nooks/domain/responses.hpp"
#include "nooks/domain/samples.hpp"
#include "nooks/domain/schedule.hpp"
#include "nooks/persistence/log_event.hpp"

namespace nooks {

/// An activated nook's private channel.
struct ChannelRecord {
  NookId nook_id;
  std::string channel_handle;
  std::string channel_name;
  UserSet members;
  Instant activated_at{};
  Instant archive_due_at{};
  bool archived = false;
  bool persistent = false;
  std::optional<Instant> archived_at;

  bool operator==(const ChannelRecord&) const = default;
};

/// Everything the service knows, as a pure fold over the event log.
struct WorkspaceState {
  std::string workspace_id;
  bool installed = false;
  Instant installed_at{};
  UserId admin;
  ScheduleConfig schedule;
  std::vector<SampleNook> samples;

  std::map<UserId, std::string> invites;  // user -> invite code
  std::map<UserId, MemberProfile> members;
  std::map<NookId, Nook> nooks;
  std::map<NookId, std::vector<InterestResponse>> responses;  // in log order
  std::map<NookId, ChannelRecord> channels;
  std::optional<LocalDate> last_opened_batch;
  std::set<std::string> seed_markers;
  std::uint64_t nook_counter = 0;
  std::uint64_t next_sequence = 0;

  bool is_onboarded(const UserId& u) const;  // onboarded and consented
  UserSet roster() const;
  const Nook* find_nook(const NookId& id) const;
  const ChannelRecord* find_channel(const NookId& id) const;
  std::vector<Nook> nooks_in_state(NookState state) const;
  std::map<UserId, InterestResponse> effective_responses(const NookId& id) const;
  EncounterHistory encounter_history() const;

  /// First batch date whose incubation has not been opened yet.
  LocalDate next_batch_to_open() const;

  bool operator==(const WorkspaceState&) const = default;
};

/// Applies one event. Throws CorruptState if the event violates the lifecycle.
void apply(WorkspaceState& state, const LogEvent& event);
WorkspaceState fold(std::span<const LogEvent> events, WorkspaceState initial = {});

nlohmann::json state_to_json(const WorkspaceState& state);
WorkspaceState state_from_json(const nlohmann::json& j);

}  // namespace nooks
