#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <set>

#include <json.hpp>

#include "nooks/platform/chat_platform.hpp"
#include "nooks/scheduler/clock.hpp"

namespace nooks {

/// In-process chat platform. Holds the workspace's users, ordinary channels,
/// nook channels and every message. Optionally mirrored to a JSON file so a
/// restarted process sees the same platform.
class LocalChat final : public ChatPlatform {
 public:
  explicit LocalChat(const Clock& clock, std::optional<std::filesystem::path> backing_file = std::nullopt);

  // Directory management (not part of the adapter surface).
  void add_user(const UserId& user, std::string display_name);
  void add_public_channel(std::string_view name, const UserSet& members);

  /// The next `n` mutating calls throw PlatformFailure.
  void fail_next(int n);

  bool has_user(const UserId& user) const override;
  std::optional<std::string> display_name(const UserId& user) const override;
  UserSet channel_members_by_name(std::string_view name) const override;

  ChannelRef create_private_channel(std::string_view name, const UserSet& members,
                                    std::string_view dedupe_key) override;
  void post_as_bot(const ChannelRef& channel, std::string_view text, std::string_view dedupe_key) override;
  void send_direct(const UserId& to, std::string_view text, std::string_view dedupe_key) override;
  void send_user_direct(const UserId& from, const UserId& to, std::string_view text) override;

  ChannelRef archive(const ChannelRef& channel) override;
  ChannelRef unarchive(const ChannelRef& channel, const UserId& requester) override;
  UserSet add_member(const ChannelRef& channel, const UserId& inviter, const UserId& invitee) override;
  ChatMessage post_message(const ChannelRef& channel, const UserId& author, std::string_view body) override;

  std::vector<ChatMessage> messages(const ChannelRef& channel, const UserId& viewer) const override;
  std::vector<DirectMessage> inbox(const UserId& user) const override;

  // Test and sim introspection.
  std::optional<ChannelRef> find_channel(const std::string& handle) const;
  UserSet members_of(const std::string& handle) const;
  std::vector<DirectMessage> all_direct_messages() const;
  std::vector<ChatMessage> all_channel_messages() const;
  std::size_t private_channel_count() const;
  /// Every call that changed platform state, in order, one JSON object each.
  std::vector<nlohmann::json> traffic() const;

 private:
  struct Channel {
    ChannelRef ref;
    UserSet members;
    std::vector<ChatMessage> messages;
  };

  void maybe_fail();
  void record(nlohmann::json entry);
  void persist() const;
  void load();
  Channel& channel_for(const ChannelRef& ref);
  const Channel& channel_for(const ChannelRef& ref) const;

  const Clock& clock_;
  std::optional<std::filesystem::path> backing_file_;
  mutable std::mutex mu_;
  std::map<UserId, std::string> users_;
  std::map<std::string, Channel> channels_;  // by handle
  std::map<std::string, std::string> channel_keys_;  // dedupe key -> handle
  std::set<std::string> post_keys_;                  // handle + '\n' + key
  std::set<std::pair<UserId, std::string>> direct_keys_;
  std::vector<DirectMessage> directs_;
  std::vector<nlohmann::json> traffic_;
  int next_channel_ = 1;
  int failures_pending_ = 0;
};

}  // namespace nooks
