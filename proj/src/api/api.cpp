#include "nooks/api/api.hpp"

#include <zlib.h>

#include <cstdio>
#include <functional>
#include <string_view>
#include <vector>

#include "nooks/domain/samples.hpp"

namespace nooks {
namespace {

using nlohmann::json;

enum class Auth { Public, Member, Admin };

struct Context {
  Workspace& ws;
  const SessionToken* session;
  const std::vector<std::string>& params;
  const std::map<std::string, std::string>& query;
  const json& body;
  SessionStore& sessions;

  const UserId& me() const { return session->user_id; }
};

using Handler = std::function<ApiResponse(Context&)>;

struct Route {
  std::string method;
  std::vector<std::string> pattern;  // "*" matches one segment
  Auth auth;
  Handler handler;
};

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  while (!path.empty()) {
    if (path.front() == '/') {
      path.remove_prefix(1);
      continue;
    }
    auto end = path.find('/');
    out.emplace_back(path.substr(0, end));
    if (end == std::string_view::npos) break;
    path.remove_prefix(end);
  }
  return out;
}

std::optional<std::vector<std::string>> match(const Route& route, const std::vector<std::string>& segments) {
  if (segments.size() != route.pattern.size()) return std::nullopt;
  std::vector<std::string> params;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (route.pattern[i] == "*") {
      params.push_back(segments[i]);
    } else if (route.pattern[i] != segments[i]) {
      return std::nullopt;
    }
  }
  return params;
}

ApiResponse error(int status, std::string_view code, std::string_view message) {
  return {status, json{{"error", code}, {"message", message}}};
}

ApiResponse error(const NooksError& e) { return error(http_status(e.code()), to_string(e.code()), e.what()); }

std::string str_field(const json& body, const char* key, bool required = true) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (required) throw NooksError(ErrorCode::ParseError, std::string("missing field ") + key);
    return {};
  }
  if (!it->is_string()) throw NooksError(ErrorCode::ParseError, std::string("field must be a string: ") + key);
  return it->get<std::string>();
}

std::string display_name_of(const Workspace& ws, const UserId& user) {
  if (auto it = ws.state().members.find(user); it != ws.state().members.end()) return it->second.display_name;
  return user.str();
}

json member_json(const Workspace& ws, const UserId& user) {
  return json{{"user_id", user.str()}, {"display_name", display_name_of(ws, user)}};
}

json profile_json(const MemberProfile& p) {
  return json{{"user_id", p.user_id.str()},
              {"display_name", p.display_name},
              {"consented", p.consented},
              {"demographics", p.demographics},
              {"onboarded_at", format_instant(p.onboarded_at)}};
}

json card_json(const NookCard& c) {
  return json{{"nook_id", c.nook_id.str()}, {"topic", c.topic}, {"initial_thoughts", c.initial_thoughts}};
}

json samples_json(std::size_t page, const std::vector<SampleNook>& all) {
  json list = json::array();
  for (const auto& s : sample_nooks(page, all)) {
    list.push_back(json{{"topic", s.topic}, {"initial_thoughts", s.initial_thoughts}});
  }
  return json{{"page", page}, {"samples", list}};
}

std::size_t page_param(const std::map<std::string, std::string>& query, const char* key) {
  auto it = query.find(key);
  if (it == query.end()) return 0;
  std::size_t page = 0;
  if (std::sscanf(it->second.c_str(), "%zu", &page) != 1) throw NooksError(ErrorCode::ParseError, "bad page");
  return page;
}

json channel_json(const Workspace& ws, const ChannelRecord& ch) {
  const Nook* nook = ws.state().find_nook(ch.nook_id);
  json members = json::array();
  for (const auto& m : ch.members) members.push_back(member_json(ws, m));
  return json{{"id", ch.nook_id.str()},
              {"name", ch.channel_name},
              {"topic", nook ? nook->draft.topic : ""},
              {"archived", ch.archived},
              {"persistent", ch.persistent},
              {"writable", !ch.archived},
              {"activated_at", format_instant(ch.activated_at)},
              {"archive_due_at", ch.persistent ? json(nullptr) : json(format_instant(ch.archive_due_at))},
              {"members", members}};
}

json message_json(const Workspace& ws, const ChatMessage& m) {
  return json{{"author", m.author ? json(m.author->str()) : json(nullptr)},
              {"author_name", m.author ? json(display_name_of(ws, *m.author)) : json("Nooks")},
              {"body", m.body},
              {"posted_at", format_instant(m.posted_at)}};
}

json direct_json(const Workspace& ws, const DirectMessage& m) {
  return json{{"from", m.from ? json(m.from->str()) : json(nullptr)},
              {"from_name", m.from ? json(display_name_of(ws, *m.from)) : json("Nooks")},
              {"body", m.body},
              {"sent_at", format_instant(m.sent_at)}};
}

// Channel routes share the same not-found rule: unknown ids and channels the
// caller is not in look the same.
const ChannelRecord& visible_channel(const Workspace& ws, const std::string& id, const UserId& me) {
  const ChannelRecord* ch = ws.state().find_channel(NookId(id));
  if (!ch || !ch->members.contains(me)) throw NooksError(ErrorCode::NotAMember, "channel not found");
  return *ch;
}

ApiResponse signup(Context& c) {
  const std::string code = str_field(c.body, "invite_code");
  const std::string name = str_field(c.body, "display_name");
  std::map<std::string, std::string> demographics;
  if (auto it = c.body.find("demographics"); it != c.body.end() && !it->is_null()) {
    if (!it->is_object()) throw NooksError(ErrorCode::ParseError, "demographics must be an object");
    for (const auto& [k, v] : it->items()) {
      demographics[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
  }
  auto consent = c.body.find("consent");
  if (consent == c.body.end() || !consent->is_boolean()) {
    throw NooksError(ErrorCode::ParseError, "consent must be a boolean");
  }
  MemberProfile profile = c.ws.signup(code, name, demographics, consent->get<bool>());
  auto token = c.sessions.issue(profile.user_id, profile.user_id == c.ws.state().admin, c.ws.now());
  json out = profile_json(profile);
  out["token"] = token.bearer;
  return {201, out};
}

ApiResponse home(Context& c) {
  json cards = json::array();
  json responses = json::object();
  for (const auto& card : c.ws.cards_for(c.me())) {
    cards.push_back(card_json(card));
    auto effective = c.ws.state().effective_responses(card.nook_id);
    if (auto it = effective.find(c.me()); it != effective.end()) {
      responses[card.nook_id.str()] = to_string(it->second.choice);
    }
  }
  json encounters = json::array();
  for (const auto& e : c.ws.top_encounters_for(c.me(), 10)) {
    json entry = member_json(c.ws, e.user);
    entry["shared_nooks"] = e.count;
    encounters.push_back(entry);
  }
  return {200, json{{"cards", cards},
                    {"my_responses", responses},
                    {"samples", samples_json(page_param(c.query, "samples_page"), c.ws.state().samples)},
                    {"encounters", encounters}}};
}

ApiResponse create_nook(Context& c) {
  NookDraft draft;
  draft.creator = c.me();
  draft.topic = str_field(c.body, "topic");
  draft.initial_thoughts = str_field(c.body, "initial_thoughts", false);
  draft.channel_title = str_field(c.body, "channel_title");
  if (auto it = c.body.find("excluded"); it != c.body.end() && !it->is_null()) {
    if (!it->is_array()) throw NooksError(ErrorCode::ParseError, "excluded must be a list");
    for (const auto& u : *it) {
      if (!u.is_string()) throw NooksError(ErrorCode::ParseError, "excluded entries must be strings");
      draft.excluded.insert(UserId(u.get<std::string>()));
    }
  }
  if (auto it = c.body.find("require_two_others"); it != c.body.end() && !it->is_null()) {
    if (!it->is_boolean()) throw NooksError(ErrorCode::ParseError, "require_two_others must be a boolean");
    draft.require_two_others = it->get<bool>();
  }
  NookId id = c.ws.create_nook(std::move(draft));
  const Nook& nook = *c.ws.state().find_nook(id);
  return {201, json{{"nook_id", id.str()},
                    {"batch_date", format_date(nook.batch_date)},
                    {"state", to_string(nook.state)}}};
}

ApiResponse samples(Context& c) { return {200, samples_json(page_param(c.query, "page"), c.ws.state().samples)}; }

ApiResponse respond(Context& c) {
  auto choice = parse_choice(str_field(c.body, "choice"));
  if (!choice) throw NooksError(ErrorCode::ParseError, "choice must be interested or not_for_me");
  const NookId id(c.params[0]);
  const Nook* nook = c.ws.state().find_nook(id);
  // Excluded users must not learn the nook exists.
  if (!nook || nook->draft.excluded.contains(c.me())) throw NooksError(ErrorCode::UnknownNook, "nook not found");
  c.ws.respond(id, c.me(), *choice);
  return {200, json{{"nook_id", id.str()}, {"choice", to_string(*choice)}}};
}

ApiResponse list_channels(Context& c) {
  json list = json::array();
  for (const ChannelRecord* ch : c.ws.channels_for(c.me())) list.push_back(channel_json(c.ws, *ch));
  return {200, json{{"channels", list}}};
}

ApiResponse get_messages(Context& c) {
  const ChannelRecord& ch = visible_channel(c.ws, c.params[0], c.me());
  json list = json::array();
  for (const auto& m : c.ws.channel_messages(ch.nook_id, c.me())) list.push_back(message_json(c.ws, m));
  return {200, json{{"messages", list}}};
}

ApiResponse post_message(Context& c) {
  const ChannelRecord& ch = visible_channel(c.ws, c.params[0], c.me());
  const std::string body = str_field(c.body, "body");
  if (body.empty()) throw NooksError(ErrorCode::ParseError, "empty message");
  return {201, message_json(c.ws, c.ws.post_message(ch.nook_id, c.me(), body))};
}

ApiResponse unarchive(Context& c) {
  const ChannelRecord& ch = visible_channel(c.ws, c.params[0], c.me());
  const NookId id = ch.nook_id;
  c.ws.unarchive(id, c.me());
  return {200, channel_json(c.ws, *c.ws.state().find_channel(id))};
}

ApiResponse add_member(Context& c) {
  const ChannelRecord& ch = visible_channel(c.ws, c.params[0], c.me());
  const NookId id = ch.nook_id;
  const UserId invitee(str_field(c.body, "user_id"));
  c.ws.add_member(id, c.me(), invitee);
  return {200, channel_json(c.ws, *c.ws.state().find_channel(id))};
}

ApiResponse send_direct(Context& c) {
  const UserId to(c.params[0]);
  if (!c.ws.state().is_onboarded(to)) throw NooksError(ErrorCode::UnknownUser, "user not found");
  const std::string body = str_field(c.body, "body");
  if (body.empty()) throw NooksError(ErrorCode::ParseError, "empty message");
  c.ws.send_user_direct(c.me(), to, body);
  return {201, json{{"to", to.str()}, {"body", body}, {"sent_at", format_instant(c.ws.now())}}};
}

ApiResponse inbox(Context& c) {
  json list = json::array();
  for (const auto& m : c.ws.platform().inbox(c.me())) list.push_back(direct_json(c.ws, m));
  return {200, json{{"messages", list}}};
}

ApiResponse admin_onboard(Context& c) {
  std::vector<UserId> invited;
  if (auto it = c.body.find("channel_name"); it != c.body.end() && !it->is_null()) {
    invited = c.ws.onboard_channel(str_field(c.body, "channel_name"));
  } else if (auto users = c.body.find("user_names"); users != c.body.end() && users->is_array()) {
    std::vector<UserId> targets;
    for (const auto& u : *users) {
      if (!u.is_string()) throw NooksError(ErrorCode::ParseError, "user_names entries must be strings");
      targets.emplace_back(u.get<std::string>());
    }
    invited = c.ws.onboard_users(targets);
  } else {
    throw NooksError(ErrorCode::ParseError, "channel_name or user_names required");
  }
  json list = json::array();
  for (const auto& u : invited) list.push_back(u.str());
  return {200, json{{"invited", list}}};
}

ApiResponse admin_predefined(Context& c) {
  auto nooks = c.body.find("nooks");
  if (nooks == c.body.end() || !nooks->is_array()) throw NooksError(ErrorCode::ParseError, "nooks must be a list");
  std::vector<PredefinedNook> list;
  for (const auto& n : *nooks) {
    if (!n.is_object()) throw NooksError(ErrorCode::ParseError, "nooks entries must be objects");
    PredefinedNook p;
    p.topic = str_field(n, "topic");
    p.initial_thoughts = str_field(n, "initial_thoughts", false);
    p.channel_title = str_field(n, "channel_title", false);
    auto date = parse_date(str_field(n, "batch_date"));
    if (!date) throw NooksError(ErrorCode::ParseError, "batch_date must be YYYY-MM-DD");
    p.batch_date = *date;
    list.push_back(std::move(p));
  }
  std::string marker = str_field(c.body, "seed_marker", false);
  if (marker.empty()) {
    const std::string canonical = nooks->dump();
    char buf[24];
    std::snprintf(buf, sizeof buf, "api-%08lx",
                  crc32(0L, reinterpret_cast<const Bytef*>(canonical.data()), static_cast<uInt>(canonical.size())));
    marker = buf;
  }
  json ids = json::array();
  for (const auto& id : c.ws.seed_predefined(list, marker)) ids.push_back(id.str());
  return {201, json{{"nook_ids", ids}, {"seed_marker", marker}}};
}

ApiResponse admin_schedule(Context& c) {
  ScheduleConfig s = c.ws.state().schedule;
  if (c.body.contains("timezone")) s.timezone = str_field(c.body, "timezone");
  auto time_field = [&](const char* key, TimeOfDay& out) {
    if (!c.body.contains(key)) return;
    auto t = parse_time_of_day(str_field(c.body, key));
    if (!t) throw NooksError(ErrorCode::InvalidConfig, std::string(key) + " must be HH:MM");
    out = *t;
  };
  time_field("batch_cutoff", s.batch_cutoff);
  time_field("activation_time", s.activation_time);
  if (auto it = c.body.find("channel_lifetime"); it != c.body.end()) {
    std::optional<Duration> d;
    if (it->is_number_integer()) d = Duration(it->get<long long>());
    if (it->is_string()) d = parse_duration(it->get<std::string>());
    if (!d) throw NooksError(ErrorCode::InvalidConfig, "channel_lifetime must be seconds or like 24h");
    s.channel_lifetime = *d;
  }
  if (auto it = c.body.find("min_members_to_activate"); it != c.body.end()) {
    if (!it->is_number_integer()) throw NooksError(ErrorCode::InvalidConfig, "min_members_to_activate");
    s.min_members_to_activate = it->get<int>();
  }
  c.ws.set_schedule(s);
  return {200, schedule_to_json(c.ws.state().schedule)};
}

ApiResponse admin_samples(Context& c) {
  auto it = c.body.find("samples");
  if (it == c.body.end() || !it->is_array()) throw NooksError(ErrorCode::ParseError, "samples must be a list");
  std::vector<SampleNook> list;
  for (const auto& s : *it) {
    if (!s.is_object()) throw NooksError(ErrorCode::ParseError, "samples entries must be objects");
    list.push_back(SampleNook{str_field(s, "topic"), str_field(s, "initial_thoughts", false)});
  }
  c.ws.set_samples(list);
  return {200, samples_json(0, c.ws.state().samples)};
}

const std::vector<Route>& routes() {
  static const std::vector<Route> table = {
      {"POST", {"signup"}, Auth::Public, signup},
      {"GET", {"home"}, Auth::Member, home},
      {"POST", {"nooks"}, Auth::Member, create_nook},
      {"GET", {"samples"}, Auth::Member, samples},
      {"POST", {"nooks", "*", "response"}, Auth::Member, respond},
      {"GET", {"channels"}, Auth::Member, list_channels},
      {"GET", {"channels", "*", "messages"}, Auth::Member, get_messages},
      {"POST", {"channels", "*", "messages"}, Auth::Member, post_message},
      {"POST", {"channels", "*", "unarchive"}, Auth::Member, unarchive},
      {"POST", {"channels", "*", "members"}, Auth::Member, add_member},
      {"POST", {"users", "*", "direct"}, Auth::Member, send_direct},
      {"GET", {"inbox"}, Auth::Member, inbox},
      {"POST", {"admin", "onboard"}, Auth::Admin, admin_onboard},
      {"POST", {"admin", "predefined"}, Auth::Admin, admin_predefined},
      {"PUT", {"admin", "schedule"}, Auth::Admin, admin_schedule},
      {"PUT", {"admin", "samples"}, Auth::Admin, admin_samples},
  };
  return table;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Unauthenticated:
      return 401;
    case ErrorCode::ConsentRequired:
    case ErrorCode::Forbidden:
      return 403;
    case ErrorCode::NotAMember:
    case ErrorCode::UnknownNook:
    case ErrorCode::UnknownChannel:
    case ErrorCode::UnknownUser:
    case ErrorCode::UnknownInvite:
      return 404;
    case ErrorCode::ExcludedUser:
    case ErrorCode::ResponseWindowClosed:
    case ErrorCode::NotIncubating:
    case ErrorCode::AlreadyOnboarded:
    case ErrorCode::BatchAlreadyOpened:
    case ErrorCode::DuplicateSeed:
    case ErrorCode::AlreadyMember:
    case ErrorCode::AlreadyArchived:
    case ErrorCode::AlreadyActive:
    case ErrorCode::ChannelArchived:
    case ErrorCode::NameCollision:
    case ErrorCode::AlreadyInstalled:
      return 409;
    case ErrorCode::EmptyTitle:
    case ErrorCode::TitleTooLong:
    case ErrorCode::TitleBadCharset:
    case ErrorCode::EmptyTopic:
    case ErrorCode::SelfExclusion:
    case ErrorCode::UnknownExcludedUser:
    case ErrorCode::NotOnboarded:
    case ErrorCode::EmptyMemberSet:
    case ErrorCode::InvalidConfig:
      return 422;
    case ErrorCode::ParseError:
      return 400;
    case ErrorCode::PlatformFailure:
      return 503;
    case ErrorCode::StorageFull:
      return 507;
    default:
      return 500;
  }
}

ApiResponse Api::handle(const ApiRequest& request) {
  auto segments = split_path(request.path);
  if (segments.size() < 2 || segments[0] != "api" || segments[1] != "v1") {
    return error(404, "NotFound", "no such route");
  }
  segments.erase(segments.begin(), segments.begin() + 2);

  const Route* route = nullptr;
  std::vector<std::string> params;
  bool path_known = false;
  for (const auto& r : routes()) {
    if (auto p = match(r, segments)) {
      path_known = true;
      if (r.method == request.method) {
        route = &r;
        params = std::move(*p);
        break;
      }
    }
  }
  if (!route) {
    return path_known ? error(405, "MethodNotAllowed", "method not allowed") : error(404, "NotFound", "no such route");
  }

  std::optional<SessionToken> session;
  if (route->auth != Auth::Public) {
    constexpr std::string_view kBearer = "Bearer ";
    std::string_view header = request.authorization;
    if (header.substr(0, kBearer.size()) == kBearer) session = sessions_.find(std::string(header.substr(kBearer.size())));
    if (!session) return error(401, "Unauthenticated", "missing or unknown bearer token");
    if (route->auth == Auth::Admin && !session->admin) return error(403, "Forbidden", "admin only");
  }

  json body = json::object();
  if (!request.body.empty()) {
    body = json::parse(request.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return error(400, "ParseError", "body must be a JSON object");
  }

  return service_.run([&](Workspace& ws) -> ApiResponse {
    Context ctx{ws, session ? &*session : nullptr, params, request.query, body, sessions_};
    try {
      if (session && !ws.state().is_onboarded(session->user_id)) {
        return error(401, "Unauthenticated", "session user is not a member");
      }
      return route->handler(ctx);
    } catch (const ValidationFailed& e) {
      json fields = json::array();
      for (const auto& v : e.errors()) fields.push_back(json{{"field", v.field}, {"code", to_string(v.code)}});
      ApiResponse r = error(422, to_string(e.code()), e.what());
      r.body["fields"] = fields;
      return r;
    } catch (const NooksError& e) {
      return error(e);
    } catch (const json::exception& e) {
      return error(400, "ParseError", e.what());
    }
  });
}

}  // namespace nooks
