#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nooks/domain/activation.hpp"
#include "nooks/domain/cards.hpp"
#include "nooks/domain/encounters.hpp"
#include "nooks/persistence/event_log.hpp"
#include "nooks/persistence/state.hpp"
#include "nooks/platform/chat_platform.hpp"
#include "nooks/scheduler/clock.hpp"
#include "nooks/scheduler/scheduler.hpp"

namespace nooks {

class ValidationFailed : public NooksError {
 public:
  explicit ValidationFailed(std::vector<ValidationError> errors)
      : NooksError(errors.empty() ? ErrorCode::ParseError : errors.front().code, "nook draft rejected"),
        errors_(std::move(errors)) {}

  const std::vector<ValidationError>& errors() const noexcept { return errors_; }

 private:
  std::vector<ValidationError> errors_;
};

struct PredefinedNook {
  std::string topic;
  std::string initial_thoughts;
  std::string channel_title;  // derived from the topic when empty
  LocalDate batch_date{};
};

/// Derives a valid channel title from free text: letters kept, runs of
/// anything else collapsed to one dash, lower-cased, trimmed to fit.
std::string title_from_topic(std::string_view topic);

/// One workspace: the state folded from its event log, plus the chat platform
/// it drives. Every state change is appended to the log before it is applied
/// in memory. Not thread-safe; callers serialize access.
class Workspace final : public EffectRunner {
 public:
  struct Options {
    EventLog::Options log;
    /// Feeds invite-code generation. Fixed seeds give reproducible runs.
    std::uint64_t seed = 0;
    /// Installed on the event log; see EventLog::set_before_append_hook.
    std::function<void(std::uint64_t)> before_append;
  };

  static std::unique_ptr<Workspace> install(const std::filesystem::path& dir, const std::string& workspace_id,
                                            const UserId& admin, const ScheduleConfig& schedule,
                                            ChatPlatform& platform, const Clock& clock, Options options);
  /// Loads the newest snapshot, folds the rest of the log and checks the
  /// result with reconcile(). Throws NotInstalled, CorruptRecord, CorruptState.
  static std::unique_ptr<Workspace> open(const std::filesystem::path& dir, ChatPlatform& platform,
                                         const Clock& clock, Options options);

  const WorkspaceState& state() const override { return state_; }
  EventLog& log() { return log_; }
  ChatPlatform& platform() { return platform_; }
  Instant now() const { return clock_.now(); }

  // Onboarding. Both return the users that were targeted; invites are
  // idempotent per user.
  std::vector<UserId> onboard_channel(std::string_view channel_name);
  std::vector<UserId> onboard_users(const std::vector<UserId>& users);
  MemberProfile signup(const std::string& invite_code, const std::string& display_name,
                       const std::map<std::string, std::string>& demographics, bool consent);

  // Nooks.
  NookId create_nook(NookDraft draft);
  std::vector<NookId> seed_predefined(const std::vector<PredefinedNook>& nooks, const std::string& seed_marker);
  void respond(const NookId& nook, const UserId& user, Choice choice);
  std::vector<NookCard> cards_for(const UserId& viewer) const;
  std::vector<Encounter> top_encounters_for(const UserId& user, std::size_t k) const;

  // Channels.
  std::vector<const ChannelRecord*> channels_for(const UserId& user) const;
  void unarchive(const NookId& nook, const UserId& requester);
  void add_member(const NookId& nook, const UserId& inviter, const UserId& invitee);
  ChatMessage post_message(const NookId& nook, const UserId& author, std::string_view body);
  std::vector<ChatMessage> channel_messages(const NookId& nook, const UserId& viewer) const;
  void send_user_direct(const UserId& from, const UserId& to, std::string_view body);

  // Administration.
  void set_schedule(const ScheduleConfig& schedule);
  void set_samples(const std::vector<SampleNook>& samples);

  /// Fires every due scheduled event at the clock's current time.
  TickReport tick();
  std::optional<Instant> next_due() const { return Scheduler::next_due(state_, clock_.now()); }

  // EffectRunner
  void open_incubation(LocalDate batch_date, Instant due_at) override;
  void activate_batch(LocalDate batch_date, Instant due_at) override;
  void archive_channel(const NookId& nook, Instant due_at) override;

 private:
  Workspace(EventLog log, WorkspaceState state, ChatPlatform& platform, const Clock& clock, Options options);

  void commit(events::Payload payload);
  void require_onboarded(const UserId& user) const;
  const ChannelRecord& channel_for_member(const NookId& nook, const UserId& user) const;
  std::string new_invite_code(const UserId& user) const;
  void invite(const UserId& user);

  EventLog log_;
  WorkspaceState state_;
  SnapshotStore snapshots_;
  ChatPlatform& platform_;
  const Clock& clock_;
  Options options_;
  Scheduler scheduler_;
};

}  // namespace nooks
