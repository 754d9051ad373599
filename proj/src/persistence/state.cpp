#include "nooks/persistence/state.hpp"

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void corrupt(const std::string& what) { throw NooksError(ErrorCode::CorruptState, what); }

Nook& nook_at(WorkspaceState& s, const NookId& id) {
  auto it = s.nooks.find(id);
  if (it == s.nooks.end()) corrupt("event references unknown nook " + id.str());
  return it->second;
}

ChannelRecord& channel_at(WorkspaceState& s, const NookId& id) {
  auto it = s.channels.find(id);
  if (it == s.channels.end()) corrupt("event references nook without channel " + id.str());
  return it->second;
}

void move_to(Nook& nook, NookState to) { nook = transition(std::move(nook), to); }

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

Instant instant_from(const json& j) { return parse_instant(j.get<std::string>()).value(); }
LocalDate date_from(const json& j) { return parse_date(j.get<std::string>()).value(); }

}  // namespace

bool WorkspaceState::is_onboarded(const UserId& u) const {
  auto it = members.find(u);
  return it != members.end() && it->second.consented;
}

UserSet WorkspaceState::roster() const {
  UserSet out;
  for (const auto& [id, profile] : members) {
    if (profile.consented) out.insert(id);
  }
  return out;
}

const Nook* WorkspaceState::find_nook(const NookId& id) const {
  auto it = nooks.find(id);
  return it == nooks.end() ? nullptr : &it->second;
}

const ChannelRecord* WorkspaceState::find_channel(const NookId& id) const {
  auto it = channels.find(id);
  return it == channels.end() ? nullptr : &it->second;
}

std::vector<Nook> WorkspaceState::nooks_in_state(NookState state) const {
  std::vector<Nook> out;
  for (const auto& [id, n] : nooks) {
    if (n.state == state) out.push_back(n);
  }
  return out;
}

std::map<UserId, InterestResponse> WorkspaceState::effective_responses(const NookId& id) const {
  auto it = responses.find(id);
  if (it == responses.end()) return {};
  return final_choices(it->second);
}

EncounterHistory WorkspaceState::encounter_history() const {
  EncounterHistory history;
  for (const auto& [id, ch] : channels) history.push_back({id, ch.members});
  return history;
}

LocalDate WorkspaceState::next_batch_to_open() const {
  if (last_opened_batch) return next_day(*last_opened_batch);
  return assign_batch(installed_at, schedule);
}

void apply(WorkspaceState& s, const LogEvent& event) {
  using namespace events;
  if (event.sequence != s.next_sequence) {
    corrupt("event sequence " + std::to_string(event.sequence) + " applied out of order");
  }
  std::visit(
      Overloaded{
          [&](const MemberInvited& e) { s.invites[e.user] = e.invite_code; },
          [&](const MemberOnboarded& e) {
            if (s.members.contains(e.profile.user_id)) corrupt("member onboarded twice: " + e.profile.user_id.str());
            MemberProfile p = e.profile;
            p.consented = false;
            s.members.emplace(p.user_id, std::move(p));
          },
          [&](const ConsentRecorded& e) {
            auto it = s.members.find(e.user);
            if (it == s.members.end()) corrupt("consent for unknown member " + e.user.str());
            it->second.consented = true;
          },
          [&](const NookCreated& e) {
            if (s.nooks.contains(e.nook_id)) corrupt("nook created twice: " + e.nook_id.str());
            Nook n;
            n.id = e.nook_id;
            n.draft = e.draft;
            n.created_at = e.created_at;
            n.batch_date = e.batch_date;
            n.origin = e.origin;
            s.nooks.emplace(n.id, std::move(n));
            if (!e.seed_marker.empty()) s.seed_markers.insert(e.seed_marker);
            ++s.nook_counter;
          },
          [&](const ResponseRecorded& e) {
            const Nook& n = nook_at(s, e.response.nook_id);
            if (n.state != NookState::Incubating) corrupt("response to non-incubating nook " + n.id.str());
            if (n.excludes(e.response.user_id)) corrupt("response from excluded user on " + n.id.str());
            s.responses[n.id].push_back(e.response);
          },
          [&](const BatchOpened& e) {
            if (s.last_opened_batch && e.batch_date <= *s.last_opened_batch) {
              corrupt("batch " + format_date(e.batch_date) + " opened out of order");
            }
            for (const auto& id : e.nooks) move_to(nook_at(s, id), NookState::Incubating);
            s.last_opened_batch = e.batch_date;
          },
          [&](const NookActivated& e) {
            Nook& n = nook_at(s, e.nook_id);
            move_to(n, NookState::Activated);
            for (const auto& u : e.members) {
              if (n.excludes(u)) corrupt("excluded user in member set of " + n.id.str());
            }
            s.channels[e.nook_id] = ChannelRecord{e.nook_id,        e.channel_handle, e.channel_name, e.members,
                                                  e.activated_at,   e.archive_due_at, false,          false,
                                                  std::nullopt};
          },
          [&](const NookNotActivated& e) {
            Nook& n = nook_at(s, e.nook_id);
            move_to(n, NookState::NotActivated);
            n.not_activated_reason = e.reason;
          },
          [&](const ChannelArchived& e) {
            move_to(nook_at(s, e.nook_id), NookState::Archived);
            auto& ch = channel_at(s, e.nook_id);
            ch.archived = true;
            ch.archived_at = e.archived_at;
          },
          [&](const ChannelUnarchived& e) {
            move_to(nook_at(s, e.nook_id), NookState::Persistent);
            auto& ch = channel_at(s, e.nook_id);
            if (!ch.members.contains(e.requester)) corrupt("unarchive by non-member on " + e.nook_id.str());
            ch.archived = false;
            ch.persistent = true;
          },
          [&](const MemberAddedToChannel& e) {
            const Nook& n = nook_at(s, e.nook_id);
            auto& ch = channel_at(s, e.nook_id);
            if (n.excludes(e.invitee)) corrupt("excluded user added to " + n.id.str());
            if (!ch.members.contains(e.inviter) || ch.members.contains(e.invitee)) {
              corrupt("invalid manual add on " + n.id.str());
            }
            ch.members.insert(e.invitee);
          },
          [&](const ConfigChanged& e) {
            if (e.workspace_id) {
              if (s.installed) corrupt("workspace installed twice");
              s.workspace_id = *e.workspace_id;
              s.installed = true;
              s.installed_at = event.occurred_at;
            }
            if (e.admin) s.admin = *e.admin;
            if (e.schedule) s.schedule = *e.schedule;
            if (e.samples) s.samples = *e.samples;
          },
      },
      event.payload);
  ++s.next_sequence;
}

WorkspaceState fold(std::span<const LogEvent> events, WorkspaceState initial) {
  for (const auto& e : events) apply(initial, e);
  return initial;
}

json state_to_json(const WorkspaceState& s) {
  json members = json::array();
  for (const auto& [id, p] : s.members) {
    members.push_back({{"user", id.str()},
                       {"display_name", p.display_name},
                       {"consented", p.consented},
                       {"demographics", p.demographics},
                       {"onboarded_at", format_instant(p.onboarded_at)}});
  }
  json invites = json::object();
  for (const auto& [u, code] : s.invites) invites[u.str()] = code;
  json nooks = json::array();
  for (const auto& [id, n] : s.nooks) {
    json j{{"id", id.str()},
           {"creator", n.draft.creator.str()},
           {"topic", n.draft.topic},
           {"initial_thoughts", n.draft.initial_thoughts},
           {"channel_title", n.draft.channel_title},
           {"excluded", users_json(n.draft.excluded)},
           {"require_two_others", n.draft.require_two_others},
           {"created_at", format_instant(n.created_at)},
           {"batch_date", format_date(n.batch_date)},
           {"state", to_string(n.state)},
           {"origin", to_string(n.origin)}};
    j["not_activated_reason"] = n.not_activated_reason ? json(to_string(*n.not_activated_reason)) : json(nullptr);
    nooks.push_back(std::move(j));
  }
  json responses = json::object();
  for (const auto& [id, list] : s.responses) {
    json arr = json::array();
    for (const auto& r : list) {
      arr.push_back({{"user", r.user_id.str()},
                     {"choice", to_string(r.choice)},
                     {"responded_at", format_instant(r.responded_at)}});
    }
    responses[id.str()] = arr;
  }
  json channels = json::array();
  for (const auto& [id, c] : s.channels) {
    json j{{"nook_id", id.str()},
           {"handle", c.channel_handle},
           {"name", c.channel_name},
           {"members", users_json(c.members)},
           {"activated_at", format_instant(c.activated_at)},
           {"archive_due_at", format_instant(c.archive_due_at)},
           {"archived", c.archived},
           {"persistent", c.persistent}};
    j["archived_at"] = c.archived_at ? json(format_instant(*c.archived_at)) : json(nullptr);
    channels.push_back(std::move(j));
  }
  json samples = json::array();
  for (const auto& smp : s.samples) samples.push_back({{"topic", smp.topic}, {"initial_thoughts", smp.initial_thoughts}});

  json j{{"workspace_id", s.workspace_id},
         {"installed", s.installed},
         {"installed_at", format_instant(s.installed_at)},
         {"admin", s.admin.str()},
         {"schedule", schedule_to_json(s.schedule)},
         {"samples", samples},
         {"invites", invites},
         {"members", members},
         {"nooks", nooks},
         {"responses", responses},
         {"channels", channels},
         {"seed_markers", s.seed_markers},
         {"nook_counter", s.nook_counter},
         {"next_sequence", s.next_sequence}};
  j["last_opened_batch"] = s.last_opened_batch ? json(format_date(*s.last_opened_batch)) : json(nullptr);
  return j;
}

WorkspaceState state_from_json(const json& j) {
  WorkspaceState s;
  try {
    s.workspace_id = j.at("workspace_id").get<std::string>();
    s.installed = j.at("installed").get<bool>();
    s.installed_at = instant_from(j.at("installed_at"));
    s.admin = UserId(j.at("admin").get<std::string>());
    s.schedule = schedule_from_json(j.at("schedule"));
    for (const auto& smp : j.at("samples")) {
      s.samples.push_back({smp.at("topic").get<std::string>(), smp.at("initial_thoughts").get<std::string>()});
    }
    for (const auto& [u, code] : j.at("invites").items()) s.invites[UserId(u)] = code.get<std::string>();
    for (const auto& m : j.at("members")) {
      MemberProfile p;
      p.user_id = UserId(m.at("user").get<std::string>());
      p.display_name = m.at("display_name").get<std::string>();
      p.consented = m.at("consented").get<bool>();
      p.demographics = m.at("demographics").get<std::map<std::string, std::string>>();
      p.onboarded_at = instant_from(m.at("onboarded_at"));
      s.members.emplace(p.user_id, std::move(p));
    }
    for (const auto& nj : j.at("nooks")) {
      Nook n;
      n.id = NookId(nj.at("id").get<std::string>());
      n.draft.creator = UserId(nj.at("creator").get<std::string>());
      n.draft.topic = nj.at("topic").get<std::string>();
      n.draft.initial_thoughts = nj.at("initial_thoughts").get<std::string>();
      n.draft.channel_title = nj.at("channel_title").get<std::string>();
      n.draft.excluded = users_from(nj.at("excluded"));
      n.draft.require_two_others = nj.at("require_two_others").get<bool>();
      n.created_at = instant_from(nj.at("created_at"));
      n.batch_date = date_from(nj.at("batch_date"));
      n.state = parse_nook_state(nj.at("state").get<std::string>()).value();
      n.origin = parse_nook_origin(nj.at("origin").get<std::string>()).value();
      if (!nj.at("not_activated_reason").is_null()) {
        n.not_activated_reason = parse_not_activated_reason(nj.at("not_activated_reason").get<std::string>());
      }
      s.nooks.emplace(n.id, std::move(n));
    }
    for (const auto& [id, arr] : j.at("responses").items()) {
      auto& list = s.responses[NookId(id)];
      for (const auto& r : arr) {
        list.push_back({NookId(id), UserId(r.at("user").get<std::string>()),
                        parse_choice(r.at("choice").get<std::string>()).value(),
                        instant_from(r.at("responded_at"))});
      }
    }
    for (const auto& cj : j.at("channels")) {
      ChannelRecord c;
      c.nook_id = NookId(cj.at("nook_id").get<std::string>());
      c.channel_handle = cj.at("handle").get<std::string>();
      c.channel_name = cj.at("name").get<std::string>();
      c.members = users_from(cj.at("members"));
      c.activated_at = instant_from(cj.at("activated_at"));
      c.archive_due_at = instant_from(cj.at("archive_due_at"));
      c.archived = cj.at("archived").get<bool>();
      c.persistent = cj.at("persistent").get<bool>();
      if (!cj.at("archived_at").is_null()) c.archived_at = instant_from(cj.at("archived_at"));
      s.channels.emplace(c.nook_id, std::move(c));
    }
    s.seed_markers = j.at("seed_markers").get<std::set<std::string>>();
    s.nook_counter = j.at("nook_counter").get<std::uint64_t>();
    s.next_sequence = j.at("next_sequence").get<std::uint64_t>();
    if (!j.at("last_opened_batch").is_null()) s.last_opened_batch = date_from(j.at("last_opened_batch"));
  } catch (const std::exception& e) {
    throw NooksError(ErrorCode::ParseError, std::string("malformed state snapshot: ") + e.what());
  }
  return s;
}

}  // namespace nooks
