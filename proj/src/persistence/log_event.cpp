#include "nooks/persistence/log_event.hpp"

#include <array>

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

Instant instant_from(const json& j) {
  auto t = parse_instant(j.get<std::string>());
  if (!t) throw NooksError(ErrorCode::ParseError, "bad instant " + j.dump());
  return *t;
}

LocalDate date_from(const json& j) {
  auto d = parse_date(j.get<std::string>());
  if (!d) throw NooksError(ErrorCode::ParseError, "bad date " + j.dump());
  return *d;
}

TimeOfDay time_from(const json& j) {
  auto t = parse_time_of_day(j.get<std::string>());
  if (!t) throw NooksError(ErrorCode::ParseError, "bad time of day " + j.dump());
  return *t;
}

json payload_json(const events::Payload& p) {
  using namespace events;
  return std::visit(
      Overloaded{
          [](const MemberInvited& e) { return json{{"user", e.user.str()}, {"invite_code", e.invite_code}}; },
          [](const MemberOnboarded& e) {
            return json{{"user", e.profile.user_id.str()},
                        {"display_name", e.profile.display_name},
                        {"demographics", e.profile.demographics},
                        {"onboarded_at", format_instant(e.profile.onboarded_at)}};
          },
          [](const ConsentRecorded& e) { return json{{"user", e.user.str()}}; },
          [](const NookCreated& e) {
            json j{{"nook_id", e.nook_id.str()},
                   {"creator", e.draft.creator.str()},
                   {"topic", e.draft.topic},
                   {"initial_thoughts", e.draft.initial_thoughts},
                   {"channel_title", e.draft.channel_title},
                   {"excluded", users_json(e.draft.excluded)},
                   {"require_two_others", e.draft.require_two_others},
                   {"origin", to_string(e.origin)},
                   {"created_at", format_instant(e.created_at)},
                   {"batch_date", format_date(e.batch_date)}};
            if (!e.seed_marker.empty()) j["seed_marker"] = e.seed_marker;
            return j;
          },
          [](const ResponseRecorded& e) {
            return json{{"nook_id", e.response.nook_id.str()},
                        {"user", e.response.user_id.str()},
                        {"choice", to_string(e.response.choice)},
                        {"responded_at", format_instant(e.response.responded_at)}};
          },
          [](const BatchOpened& e) {
            json ids = json::array();
            for (const auto& n : e.nooks) ids.push_back(n.str());
            return json{{"batch_date", format_date(e.batch_date)}, {"nooks", ids}};
          },
          [](const NookActivated& e) {
            return json{{"nook_id", e.nook_id.str()},
                        {"channel_handle", e.channel_handle},
                        {"channel_name", e.channel_name},
                        {"members", users_json(e.members)},
                        {"activated_at", format_instant(e.activated_at)},
                        {"archive_due_at", format_instant(e.archive_due_at)}};
          },
          [](const NookNotActivated& e) {
            return json{{"nook_id", e.nook_id.str()},
                        {"reason", to_string(e.reason)},
                        {"decided_at", format_instant(e.decided_at)}};
          },
          [](const ChannelArchived& e) {
            return json{{"nook_id", e.nook_id.str()}, {"archived_at", format_instant(e.archived_at)}};
          },
          [](const ChannelUnarchived& e) {
            return json{{"nook_id", e.nook_id.str()}, {"requester", e.requester.str()}};
          },
          [](const MemberAddedToChannel& e) {
            return json{{"nook_id", e.nook_id.str()}, {"inviter", e.inviter.str()}, {"invitee", e.invitee.str()}};
          },
          [](const ConfigChanged& e) {
            json j = json::object();
            if (e.workspace_id) j["workspace_id"] = *e.workspace_id;
            if (e.admin) j["admin"] = e.admin->str();
            if (e.schedule) j["schedule"] = schedule_to_json(*e.schedule);
            if (e.samples) {
              json arr = json::array();
              for (const auto& s : *e.samples) arr.push_back({{"topic", s.topic}, {"initial_thoughts", s.initial_thoughts}});
              j["samples"] = arr;
            }
            return j;
          },
      },
      p);
}

events::Payload payload_from(std::string_view type, const json& j) {
  using namespace events;
  if (type == "MemberInvited") {
    return MemberInvited{UserId(j.at("user").get<std::string>()), j.at("invite_code").get<std::string>()};
  }
  if (type == "MemberOnboarded") {
    MemberProfile p;
    p.user_id = UserId(j.at("user").get<std::string>());
    p.display_name = j.at("display_name").get<std::string>();
    p.demographics = j.at("demographics").get<std::map<std::string, std::string>>();
    p.onboarded_at = instant_from(j.at("onboarded_at"));
    return MemberOnboarded{std::move(p)};
  }
  if (type == "ConsentRecorded") return ConsentRecorded{UserId(j.at("user").get<std::string>())};
  if (type == "NookCreated") {
    NookCreated e;
    e.nook_id = NookId(j.at("nook_id").get<std::string>());
    e.draft.creator = UserId(j.at("creator").get<std::string>());
    e.draft.topic = j.at("topic").get<std::string>();
    e.draft.initial_thoughts = j.at("initial_thoughts").get<std::string>();
    e.draft.channel_title = j.at("channel_title").get<std::string>();
    e.draft.excluded = users_from(j.at("excluded"));
    e.draft.require_two_others = j.at("require_two_others").get<bool>();
    auto origin = parse_nook_origin(j.at("origin").get<std::string>());
    if (!origin) throw NooksError(ErrorCode::ParseError, "bad origin");
    e.origin = *origin;
    e.created_at = instant_from(j.at("created_at"));
    e.batch_date = date_from(j.at("batch_date"));
    e.seed_marker = j.value("seed_marker", "");
    return e;
  }
  if (type == "ResponseRecorded") {
    auto choice = parse_choice(j.at("choice").get<std::string>());
    if (!choice) throw NooksError(ErrorCode::ParseError, "bad choice");
    return ResponseRecorded{InterestResponse{NookId(j.at("nook_id").get<std::string>()),
                                             UserId(j.at("user").get<std::string>()), *choice,
                                             instant_from(j.at("responded_at"))}};
  }
  if (type == "BatchOpened") {
    BatchOpened e;
    e.batch_date = date_from(j.at("batch_date"));
    for (const auto& n : j.at("nooks")) e.nooks.emplace_back(n.get<std::string>());
    return e;
  }
  if (type == "NookActivated") {
    return NookActivated{NookId(j.at("nook_id").get<std::string>()), j.at("channel_handle").get<std::string>(),
                         j.at("channel_name").get<std::string>(),    users_from(j.at("members")),
                         instant_from(j.at("activated_at")),         instant_from(j.at("archive_due_at"))};
  }
  if (type == "NookNotActivated") {
    auto reason = parse_not_activated_reason(j.at("reason").get<std::string>());
    if (!reason) throw NooksError(ErrorCode::ParseError, "bad reason");
    return NookNotActivated{NookId(j.at("nook_id").get<std::string>()), *reason, instant_from(j.at("decided_at"))};
  }
  if (type == "ChannelArchived") {
    return ChannelArchived{NookId(j.at("nook_id").get<std::string>()), instant_from(j.at("archived_at"))};
  }
  if (type == "ChannelUnarchived") {
    return ChannelUnarchived{NookId(j.at("nook_id").get<std::string>()), UserId(j.at("requester").get<std::string>())};
  }
  if (type == "MemberAddedToChannel") {
    return MemberAddedToChannel{NookId(j.at("nook_id").get<std::string>()), UserId(j.at("inviter").get<std::string>()),
                                UserId(j.at("invitee").get<std::string>())};
  }
  if (type == "ConfigChanged") {
    ConfigChanged e;
    if (j.contains("workspace_id")) e.workspace_id = j.at("workspace_id").get<std::string>();
    if (j.contains("admin")) e.admin = UserId(j.at("admin").get<std::string>());
    if (j.contains("schedule")) e.schedule = schedule_from_json(j.at("schedule"));
    if (j.contains("samples")) {
      std::vector<SampleNook> samples;
      for (const auto& s : j.at("samples")) {
        samples.push_back({s.at("topic").get<std::string>(), s.at("initial_thoughts").get<std::string>()});
      }
      e.samples = std::move(samples);
    }
    return e;
  }
  throw NooksError(ErrorCode::ParseError, "unknown event type " + std::string(type));
}

constexpr std::array<std::string_view, 12> kPayloadTypes{
    "MemberInvited",   "MemberOnboarded",   "ConsentRecorded", "NookCreated",
    "ResponseRecorded", "BatchOpened",      "NookActivated",   "NookNotActivated",
    "ChannelArchived", "ChannelUnarchived", "MemberAddedToChannel", "ConfigChanged"};

static_assert(kPayloadTypes.size() == std::variant_size_v<events::Payload>);

}  // namespace

namespace events {

std::string_view payload_type(const Payload& p) { return kPayloadTypes[p.index()]; }

std::vector<std::string_view> all_payload_types() { return {kPayloadTypes.begin(), kPayloadTypes.end()}; }

}  // namespace events

json schedule_to_json(const ScheduleConfig& s) {
  return json{{"timezone", s.timezone},
              {"batch_cutoff", format_time_of_day(s.batch_cutoff)},
              {"activation_time", format_time_of_day(s.activation_time)},
              {"channel_lifetime_seconds", s.channel_lifetime.count()},
              {"min_members_to_activate", s.min_members_to_activate}};
}

ScheduleConfig schedule_from_json(const json& j) {
  ScheduleConfig s;
  s.timezone = j.at("timezone").get<std::string>();
  s.batch_cutoff = time_from(j.at("batch_cutoff"));
  s.activation_time = time_from(j.at("activation_time"));
  s.channel_lifetime = Duration(j.at("channel_lifetime_seconds").get<long long>());
  s.min_members_to_activate = j.at("min_members_to_activate").get<int>();
  return s;
}

json to_json(const LogEvent& e) {
  json j{{"seq", e.sequence}, {"at", format_instant(e.occurred_at)}, {"type", events::payload_type(e.payload)}};
  j["data"] = payload_json(e.payload);
  return j;
}

LogEvent log_event_from_json(const json& j) {
  try {
    LogEvent e;
    e.sequence = j.at("seq").get<std::uint64_t>();
    e.occurred_at = instant_from(j.at("at"));
    e.payload = payload_from(j.at("type").get<std::string>(), j.at("data"));
    return e;
  } catch (const json::exception& ex) {
    throw NooksError(ErrorCode::ParseError, std::string("malformed log event: ") + ex.what());
  }
}

bool contains_message_body_field(const json& j) {
  static constexpr std::array<std::string_view, 6> kDenied{"body", "text", "message", "messages", "content",
                                                           "message_body"};
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      for (auto denied : kDenied) {
        if (key == denied) return true;
      }
      if (contains_message_body_field(value)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (contains_message_body_field(v)) return true;
    }
  }
  return false;
}

}  // namespace nooks
