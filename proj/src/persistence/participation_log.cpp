#include "nooks/persistence/participation_log.hpp"

#include <sstream>

namespace nooks {
namespace {

std::string escape(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (char c : v) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  return out;
}

std::string join(const UserSet& users) {
  std::string out;
  for (const auto& u : users) {
    if (!out.empty()) out += ',';
    out += u.str();
  }
  return out;
}

}  // namespace

std::string export_participation_log(const WorkspaceState& state, bool include_demographics) {
  std::ostringstream out;
  bool first = true;
  auto separator = [&] {
    if (!first) out << "%%\n";
    first = false;
  };

  for (const auto& [id, nook] : state.nooks) {
    separator();
    UserSet interested;
    UserSet not_interested;
    for (const auto& [user, r] : state.effective_responses(id)) {
      (r.choice == Choice::Interested ? interested : not_interested).insert(user);
    }
    const ChannelRecord* channel = state.find_channel(id);

    out << "nook: " << id.str() << '\n'
        << "origin: " << to_string(nook.origin) << '\n'
        << "topic: " << escape(nook.draft.topic) << '\n'
        << "details: " << escape(nook.draft.initial_thoughts) << '\n'
        << "channel_title: " << escape(nook.draft.channel_title) << '\n'
        << "creator: " << (nook.origin == NookOrigin::Member ? nook.creator().str() : "") << '\n'
        << "interested: " << join(interested) << '\n'
        << "not_interested: " << join(not_interested) << '\n'
        << "members: " << (channel ? join(channel->members) : "") << '\n'
        << "state: " << to_string(nook.state) << '\n';
    if (nook.not_activated_reason) out << "not_activated_reason: " << to_string(*nook.not_activated_reason) << '\n';
    out << "created_at: " << format_instant(nook.created_at) << '\n'
        << "batch_date: " << format_date(nook.batch_date) << '\n';
    if (channel) {
      out << "activated_at: " << format_instant(channel->activated_at) << '\n';
      if (channel->archived_at) out << "archived_at: " << format_instant(*channel->archived_at) << '\n';
    }
  }

  if (include_demographics) {
    for (const auto& [id, profile] : state.members) {
      separator();
      out << "member: " << id.str() << '\n';
      for (const auto& [k, v] : profile.demographics) out << "demographic." << escape(k) << ": " << escape(v) << '\n';
    }
  }
  return out.str();
}

}  // namespace nooks
