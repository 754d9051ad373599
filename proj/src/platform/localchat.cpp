#include "nooks/platform/localchat.hpp"

#include <fstream>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

using nlohmann::json;

json users_json(const UserSet& users) {
  json arr = json::array();
  for (const auto& u : users) arr.push_back(u.str());
  return arr;
}

UserSet users_from(const json& arr) {
  UserSet out;
  for (const auto& v : arr) out.insert(UserId(v.get<std::string>()));
  return out;
}

json message_json(const ChatMessage& m) {
  json j{{"channel", m.channel}, {"body", m.body}, {"posted_at", format_instant(m.posted_at)}};
  j["author"] = m.author ? json(m.author->str()) : json(nullptr);
  return j;
}

ChatMessage message_from(const json& j) {
  ChatMessage m;
  m.channel = j.at("channel").get<std::string>();
  m.body = j.at("body").get<std::string>();
  m.posted_at = parse_instant(j.at("posted_at").get<std::string>()).value_or(Instant{});
  if (!j.at("author").is_null()) m.author = UserId(j.at("author").get<std::string>());
  return m;
}

json direct_json(const DirectMessage& m) {
  json j{{"to", m.to.str()}, {"body", m.body}, {"sent_at", format_instant(m.sent_at)}};
  j["from"] = m.from ? json(m.from->str()) : json(nullptr);
  return j;
}

DirectMessage direct_from(const json& j) {
  DirectMessage m;
  m.to = UserId(j.at("to").get<std::string>());
  m.body = j.at("body").get<std::string>();
  m.sent_at = parse_instant(j.at("sent_at").get<std::string>()).value_or(Instant{});
  if (!j.at("from").is_null()) m.from = UserId(j.at("from").get<std::string>());
  return m;
}

}  // namespace

LocalChat::LocalChat(const Clock& clock, std::optional<std::filesystem::path> backing_file)
    : clock_(clock), backing_file_(std::move(backing_file)) {
  if (backing_file_ && std::filesystem::exists(*backing_file_)) load();
}

void LocalChat::add_user(const UserId& user, std::string display_name) {
  std::lock_guard lock(mu_);
  users_[user] = std::move(display_name);
  persist();
}

void LocalChat::add_public_channel(std::string_view name, const UserSet& members) {
  std::lock_guard lock(mu_);
  for (const auto& u : members) {
    if (!users_.contains(u)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + u.str());
  }
  for (auto& [handle, ch] : channels_) {
    if (ch.ref.name == name && !ch.ref.is_private) {
      ch.members.insert(members.begin(), members.end());
      persist();
      return;
    }
  }
  const std::string handle = "C" + std::to_string(next_channel_++);
  channels_[handle] = Channel{ChannelRef{handle, std::string(name), false, true}, members, {}};
  persist();
}

void LocalChat::fail_next(int n) {
  std::lock_guard lock(mu_);
  failures_pending_ = n;
}

void LocalChat::maybe_fail() {
  if (failures_pending_ > 0) {
    --failures_pending_;
    throw NooksError(ErrorCode::PlatformFailure, "localchat: injected failure");
  }
}

void LocalChat::record(json entry) {
  entry["at"] = format_instant(clock_.now());
  traffic_.push_back(std::move(entry));
}

bool LocalChat::has_user(const UserId& user) const {
  std::lock_guard lock(mu_);
  return users_.contains(user);
}

std::optional<std::string> LocalChat::display_name(const UserId& user) const {
  std::lock_guard lock(mu_);
  auto it = users_.find(user);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

UserSet LocalChat::channel_members_by_name(std::string_view name) const {
  std::lock_guard lock(mu_);
  for (const auto& [handle, ch] : channels_) {
    if (ch.ref.name == name && !ch.ref.is_private) return ch.members;
  }
  throw NooksError(ErrorCode::UnknownChannel, "no channel named " + std::string(name));
}

LocalChat::Channel& LocalChat::channel_for(const ChannelRef& ref) {
  auto it = channels_.find(ref.handle);
  if (it == channels_.end()) throw NooksError(ErrorCode::UnknownChannel, "unknown channel " + ref.handle);
  return it->second;
}

const LocalChat::Channel& LocalChat::channel_for(const ChannelRef& ref) const {
  auto it = channels_.find(ref.handle);
  if (it == channels_.end()) throw NooksError(ErrorCode::UnknownChannel, "unknown channel " + ref.handle);
  return it->second;
}

ChannelRef LocalChat::create_private_channel(std::string_view name, const UserSet& members,
                                             std::string_view dedupe_key) {
  std::lock_guard lock(mu_);
  if (!dedupe_key.empty()) {
    if (auto it = channel_keys_.find(std::string(dedupe_key)); it != channel_keys_.end()) {
      return channels_.at(it->second).ref;
    }
  }
  maybe_fail();
  if (members.empty()) throw NooksError(ErrorCode::EmptyMemberSet, "channel needs at least one member");
  for (const auto& u : members) {
    if (!users_.contains(u)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + u.str());
  }
  auto taken = [&](const std::string& candidate) {
    for (const auto& [h, ch] : channels_) {
      if (ch.ref.name == candidate) return true;
    }
    return false;
  };
  std::string actual(name);
  for (int suffix = 2; taken(actual); ++suffix) actual = std::string(name) + "-" + std::to_string(suffix);

  const std::string handle = "C" + std::to_string(next_channel_++);
  Channel ch{ChannelRef{handle, actual, true, true}, members, {}};
  channels_.emplace(handle, ch);
  if (!dedupe_key.empty()) channel_keys_[std::string(dedupe_key)] = handle;
  record({{"op", "create_private_channel"}, {"handle", handle}, {"name", actual}, {"members", users_json(members)}});
  persist();
  return ch.ref;
}

void LocalChat::post_as_bot(const ChannelRef& channel, std::string_view text, std::string_view dedupe_key) {
  std::lock_guard lock(mu_);
  const std::string key = channel.handle + "\n" + std::string(dedupe_key);
  if (!dedupe_key.empty() && post_keys_.contains(key)) return;
  maybe_fail();
  auto& ch = channel_for(channel);
  if (!ch.ref.writable) throw NooksError(ErrorCode::ChannelArchived);
  ch.messages.push_back(ChatMessage{ch.ref.handle, std::nullopt, std::string(text), clock_.now()});
  if (!dedupe_key.empty()) post_keys_.insert(key);
  record({{"op", "post_as_bot"}, {"handle", ch.ref.handle}, {"text", text}});
  persist();
}

void LocalChat::send_direct(const UserId& to, std::string_view text, std::string_view dedupe_key) {
  std::lock_guard lock(mu_);
  std::pair<UserId, std::string> key{to, std::string(dedupe_key)};
  if (!dedupe_key.empty() && direct_keys_.contains(key)) return;
  maybe_fail();
  if (!users_.contains(to)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + to.str());
  directs_.push_back(DirectMessage{to, std::nullopt, std::string(text), clock_.now()});
  if (!dedupe_key.empty()) direct_keys_.insert(std::move(key));
  record({{"op", "send_direct"}, {"to", to.str()}, {"text", text}});
  persist();
}

void LocalChat::send_user_direct(const UserId& from, const UserId& to, std::string_view text) {
  std::lock_guard lock(mu_);
  maybe_fail();
  if (!users_.contains(from)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + from.str());
  if (!users_.contains(to)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + to.str());
  directs_.push_back(DirectMessage{to, from, std::string(text), clock_.now()});
  record({{"op", "send_user_direct"}, {"from", from.str()}, {"to", to.str()}, {"text", text}});
  persist();
}

ChannelRef LocalChat::archive(const ChannelRef& channel) {
  std::lock_guard lock(mu_);
  maybe_fail();
  auto& ch = channel_for(channel);
  if (!ch.ref.writable) throw NooksError(ErrorCode::AlreadyArchived);
  ch.ref.writable = false;
  record({{"op", "archive"}, {"handle", ch.ref.handle}});
  persist();
  return ch.ref;
}

ChannelRef LocalChat::unarchive(const ChannelRef& channel, const UserId& requester) {
  std::lock_guard lock(mu_);
  maybe_fail();
  auto& ch = channel_for(channel);
  if (!ch.members.contains(requester)) throw NooksError(ErrorCode::NotAMember);
  if (ch.ref.writable) throw NooksError(ErrorCode::AlreadyActive);
  ch.ref.writable = true;
  record({{"op", "unarchive"}, {"handle", ch.ref.handle}, {"requester", requester.str()}});
  persist();
  return ch.ref;
}

UserSet LocalChat::add_member(const ChannelRef& channel, const UserId& inviter, const UserId& invitee) {
  std::lock_guard lock(mu_);
  maybe_fail();
  auto& ch = channel_for(channel);
  if (!ch.members.contains(inviter)) throw NooksError(ErrorCode::NotAMember);
  if (!users_.contains(invitee)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + invitee.str());
  if (ch.members.contains(invitee)) throw NooksError(ErrorCode::AlreadyMember);
  if (!ch.ref.writable) throw NooksError(ErrorCode::ChannelArchived);
  ch.members.insert(invitee);
  record({{"op", "add_member"}, {"handle", ch.ref.handle}, {"inviter", inviter.str()}, {"invitee", invitee.str()}});
  persist();
  return ch.members;
}

ChatMessage LocalChat::post_message(const ChannelRef& channel, const UserId& author, std::string_view body) {
  std::lock_guard lock(mu_);
  maybe_fail();
  auto& ch = channel_for(channel);
  if (!ch.members.contains(author)) throw NooksError(ErrorCode::NotAMember);
  if (!ch.ref.writable) throw NooksError(ErrorCode::ChannelArchived);
  ChatMessage msg{ch.ref.handle, author, std::string(body), clock_.now()};
  ch.messages.push_back(msg);
  record({{"op", "post_message"}, {"handle", ch.ref.handle}, {"author", author.str()}, {"body", body}});
  persist();
  return msg;
}

std::vector<ChatMessage> LocalChat::messages(const ChannelRef& channel, const UserId& viewer) const {
  std::lock_guard lock(mu_);
  const auto& ch = channel_for(channel);
  if (!ch.members.contains(viewer)) throw NooksError(ErrorCode::NotAMember);
  return ch.messages;
}

std::vector<DirectMessage> LocalChat::inbox(const UserId& user) const {
  std::lock_guard lock(mu_);
  std::vector<DirectMessage> out;
  for (const auto& m : directs_) {
    if (m.to == user || (m.from && *m.from == user)) out.push_back(m);
  }
  return out;
}

std::optional<ChannelRef> LocalChat::find_channel(const std::string& handle) const {
  std::lock_guard lock(mu_);
  auto it = channels_.find(handle);
  if (it == channels_.end()) return std::nullopt;
  return it->second.ref;
}

UserSet LocalChat::members_of(const std::string& handle) const {
  std::lock_guard lock(mu_);
  auto it = channels_.find(handle);
  return it == channels_.end() ? UserSet{} : it->second.members;
}

std::vector<DirectMessage> LocalChat::all_direct_messages() const {
  std::lock_guard lock(mu_);
  return directs_;
}

std::vector<ChatMessage> LocalChat::all_channel_messages() const {
  std::lock_guard lock(mu_);
  std::vector<ChatMessage> out;
  for (const auto& [h, ch] : channels_) out.insert(out.end(), ch.messages.begin(), ch.messages.end());
  return out;
}

std::size_t LocalChat::private_channel_count() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [h, ch] : channels_) n += ch.ref.is_private ? 1 : 0;
  return n;
}

std::vector<json> LocalChat::traffic() const {
  std::lock_guard lock(mu_);
  return traffic_;
}

void LocalChat::persist() const {
  if (!backing_file_) return;
  json users = json::object();
  for (const auto& [u, name] : users_) users[u.str()] = name;
  json channels = json::array();
  for (const auto& [handle, ch] : channels_) {
    json msgs = json::array();
    for (const auto& m : ch.messages) msgs.push_back(message_json(m));
    channels.push_back({{"handle", handle},
                        {"name", ch.ref.name},
                        {"private", ch.ref.is_private},
                        {"writable", ch.ref.writable},
                        {"members", users_json(ch.members)},
                        {"messages", msgs}});
  }
  json directs = json::array();
  for (const auto& m : directs_) directs.push_back(direct_json(m));
  json direct_keys = json::array();
  for (const auto& [u, k] : direct_keys_) direct_keys.push_back({u.str(), k});
  json doc{{"users", users},
           {"channels", channels},
           {"channel_keys", channel_keys_},
           {"post_keys", post_keys_},
           {"direct_keys", direct_keys},
           {"directs", directs},
           {"next_channel", next_channel_}};

  const auto tmp = backing_file_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << doc.dump(1) << '\n';
    if (!out) throw NooksError(ErrorCode::PlatformFailure, "localchat: cannot write " + tmp);
  }
  std::filesystem::rename(tmp, *backing_file_);
}

void LocalChat::load() {
  std::ifstream in(*backing_file_);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw NooksError(ErrorCode::ParseError, std::string("localchat store: ") + e.what());
  }
  for (const auto& [u, name] : doc.at("users").items()) users_[UserId(u)] = name.get<std::string>();
  for (const auto& c : doc.at("channels")) {
    Channel ch;
    ch.ref = ChannelRef{c.at("handle").get<std::string>(), c.at("name").get<std::string>(),
                        c.at("private").get<bool>(), c.at("writable").get<bool>()};
    ch.members = users_from(c.at("members"));
    for (const auto& m : c.at("messages")) ch.messages.push_back(message_from(m));
    channels_[ch.ref.handle] = std::move(ch);
  }
  channel_keys_ = doc.at("channel_keys").get<std::map<std::string, std::string>>();
  post_keys_ = doc.at("post_keys").get<std::set<std::string>>();
  for (const auto& k : doc.at("direct_keys")) {
    direct_keys_.insert({UserId(k.at(0).get<std::string>()), k.at(1).get<std::string>()});
  }
  for (const auto& m : doc.at("directs")) directs_.push_back(direct_from(m));
  next_channel_ = doc.at("next_channel").get<int>();
}

}  // namespace nooks
