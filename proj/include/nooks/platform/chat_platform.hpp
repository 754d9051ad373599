#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nooks/domain/types.hpp"

namespace nooks {

struct ChannelRef {
  std::string handle;
  std::string name;
  bool is_private = true;
  bool writable = true;

  bool operator==(const ChannelRef&) const = default;
};

/// A message inside a channel. Lives only in the platform's store.
struct ChatMessage {
  std::string channel;
  std::optional<UserId> author;  // nullopt: posted by the bot
  std::string body;
  Instant posted_at{};
};

struct DirectMessage {
  UserId to;
  std::optional<UserId> from;  // nullopt: sent by the bot
  std::string body;
  Instant sent_at{};
};

/// Capability surface the service needs from a chat platform. Mutating calls
/// throw NooksError; PlatformFailure signals a transient failure worth
/// retrying.
///
/// Calls taking a `dedupe_key` are idempotent per key: repeating one returns
/// the original result and produces no new traffic.
class ChatPlatform {
 public:
  virtual ~ChatPlatform() = default;

  virtual bool has_user(const UserId& user) const = 0;
  virtual std::optional<std::string> display_name(const UserId& user) const = 0;

  /// Members of a regular (non-nook) channel, used for onboarding.
  /// Throws UnknownChannel.
  virtual UserSet channel_members_by_name(std::string_view name) const = 0;

  /// Adds every member at once. A taken name gets "-2", "-3", ... appended;
  /// the returned ref carries the actual name.
  virtual ChannelRef create_private_channel(std::string_view name, const UserSet& members,
                                            std::string_view dedupe_key) = 0;
  virtual void post_as_bot(const ChannelRef& channel, std::string_view text,
                           std::string_view dedupe_key) = 0;
  virtual void send_direct(const UserId& to, std::string_view text, std::string_view dedupe_key) = 0;
  virtual void send_user_direct(const UserId& from, const UserId& to, std::string_view text) = 0;

  virtual ChannelRef archive(const ChannelRef& channel) = 0;
  virtual ChannelRef unarchive(const ChannelRef& channel, const UserId& requester) = 0;
  virtual UserSet add_member(const ChannelRef& channel, const UserId& inviter, const UserId& invitee) = 0;
  virtual ChatMessage post_message(const ChannelRef& channel, const UserId& author, std::string_view body) = 0;

  /// Reads are scoped to `viewer`; non-members get NotAMember.
  virtual std::vector<ChatMessage> messages(const ChannelRef& channel, const UserId& viewer) const = 0;
  virtual std::vector<DirectMessage> inbox(const UserId& user) const = 0;
};

}  // namespace nooks
