#include "nooks/sim/scenario.hpp"

#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "nooks/domain/activation.hpp"
#include "nooks/persistence/participation_log.hpp"
#include "nooks/platform/localchat.hpp"
#include "nooks/scheduler/clock.hpp"
#include "nooks/service/workspace.hpp"

namespace nooks::sim {
namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw NooksError(ErrorCode::ParseError, what); }

Duration parse_offset(const json& j, const std::string& where) {
  if (!j.is_string()) parse_error(where + ": time offset must be a string like \"+1d2h\"");
  std::string_view s = j.get_ref<const std::string&>();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto d = parse_duration(s);
  if (!d) parse_error(where + ": bad time offset " + j.get<std::string>());
  return *d;
}

std::string offset_string(Duration d) { return "+" + format_duration(d); }

std::string get_string(const json& j, const char* key, const std::string& where, std::optional<std::string> fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (fallback) return *fallback;
    parse_error(where + ": missing " + key);
  }
  if (!it->is_string()) parse_error(where + ": " + key + " must be a string");
  return it->get<std::string>();
}

ScheduleConfig apply_schedule_fields(ScheduleConfig s, const json& j, const std::string& where) {
  if (j.contains("timezone")) s.timezone = get_string(j, "timezone", where);
  for (const char* key : {"batch_cutoff", "activation_time"}) {
    if (!j.contains(key)) continue;
    auto t = parse_time_of_day(get_string(j, key, where));
    if (!t) parse_error(where + ": " + key + " must be HH:MM");
    (std::string_view(key) == "batch_cutoff" ? s.batch_cutoff : s.activation_time) = *t;
  }
  if (j.contains("channel_lifetime")) s.channel_lifetime = parse_offset(j["channel_lifetime"], where);
  if (j.contains("min_members_to_activate")) s.min_members_to_activate = j["min_members_to_activate"].get<int>();
  return s;
}

Instant resolve_local(const std::string& text, const Zone& zone) {
  // YYYY-MM-DDTHH:MM:SS
  if (text.size() != 19 || text[10] != 'T') parse_error("start must be YYYY-MM-DDTHH:MM:SS");
  auto date = parse_date(text.substr(0, 10));
  auto time = parse_time_of_day(text.substr(11));
  if (!date || !time) parse_error("start must be YYYY-MM-DDTHH:MM:SS");
  return zone.resolve(*date, *time);
}

const std::set<std::string, std::less<>> kActions = {
    "advance_clock", "create_nook",   "respond",      "post_message",  "unarchive",     "add_member",
    "send_direct",   "onboard",       "signup",       "seed_predefined", "set_schedule", "set_samples",
    "platform_fail", "crash_restart", "inject_crash"};

const std::set<std::string, std::less<>> kExpectations = {
    "nook_state",      "nook_state_at",  "channel_members", "event_count",  "event_at",
    "direct_messages", "channel_messages", "greeting",      "private_channels", "log_contains",
    "log_excludes",    "export_contains", "export_excludes"};

/// Owns the moving parts of one run and restarts the workspace on a simulated
/// crash, the way a supervisor would.
class Runner {
 public:
  Runner(const Scenario& sc, const RunOptions& opts)
      : sc_(sc), opts_(opts), zone_(sc.schedule.timezone), start_(resolve_local(sc.start_local, zone_)),
        clock_(start_), chat_(clock_), pending_crashes_(opts.crash_before_sequences) {
    ws_options_.log.fsync = opts.fsync;
    ws_options_.seed = sc.seed;
    ws_options_.before_append = [this](std::uint64_t seq) {
      if (pending_crashes_.erase(seq)) throw SimulatedCrash{seq};
    };
    dir_ = opts.out_dir / "workspace";
  }

  RunResult run();

 private:
  template <typename F>
  auto retrying(F&& f) {
    for (;;) {
      try {
        return f();
      } catch (const SimulatedCrash&) {
        restart();
      }
    }
  }

  void restart() {
    ws_.reset();
    ++restarts_;
    ws_ = Workspace::open(dir_, chat_, clock_, ws_options_);
  }

  void setup();
  void advance_to(Instant t);
  void execute(const Step& step);
  NookId nook_ref(const json& args, const std::string& where) const;
  json evaluate(const json& expectation, std::size_t index);
  std::vector<LogEvent> log_events() { return ws_->log().load(0); }

  const Scenario& sc_;
  const RunOptions& opts_;
  Zone zone_;
  Instant start_;
  VirtualClock clock_;
  LocalChat chat_;
  std::set<std::uint64_t> pending_crashes_;
  Workspace::Options ws_options_;
  std::filesystem::path dir_;
  std::unique_ptr<Workspace> ws_;
  std::map<std::string, NookId> labels_;
  json tick_failures_ = json::array();
  int restarts_ = 0;
};

void Runner::setup() {
  std::filesystem::remove_all(dir_);
  std::filesystem::create_directories(dir_);

  chat_.add_user(sc_.admin, sc_.admin.str());
  UserSet everyone{sc_.admin};
  for (const auto& m : sc_.members) {
    chat_.add_user(m.id, m.name);
    everyone.insert(m.id);
  }
  chat_.add_public_channel("general", everyone);

  // A crash during install leaves nothing to open; install resumes instead.
  for (;;) {
    try {
      ws_ = Workspace::install(dir_, sc_.name.empty() ? "sim" : sc_.name, sc_.admin, sc_.schedule, chat_, clock_,
                               ws_options_);
      break;
    } catch (const SimulatedCrash&) {
      ++restarts_;
    }
  }
  if (sc_.members.empty()) return;
  retrying([&] { return ws_->onboard_channel("general"); });
  for (const auto& m : sc_.members) {
    if (!m.onboard || m.id == sc_.admin) continue;
    retrying([&] {
      return ws_->signup(ws_->state().invites.at(m.id), m.name, m.demographics, true);
    });
  }
}

void Runner::advance_to(Instant t) {
  for (;;) {
    auto due = ws_->next_due();
    if (!due || *due > t) break;
    if (*due > clock_.now()) clock_.set(*due);
    TickReport report = retrying([&] { return ws_->tick(); });
    if (report.failures.empty()) continue;
    for (const auto& f : report.failures) {
      tick_failures_.push_back(json{{"event", f.event.describe()}, {"error", f.error}});
    }
    // Transient platform failure: retry a minute later.
    const Instant retry = clock_.now() + std::chrono::minutes(1);
    if (retry > t) break;
    clock_.set(retry);
  }
  if (t > clock_.now()) clock_.set(t);
}

NookId Runner::nook_ref(const json& args, const std::string& where) const {
  const std::string ref = get_string(args, "nook", where);
  if (auto it = labels_.find(ref); it != labels_.end()) return it->second;
  return NookId(ref);
}

void Runner::execute(const Step& step) {
  const json& a = step.args;
  const std::string where = "step " + step.action;
  auto user = [&](const char* key) { return UserId(get_string(a, key, where)); };

  if (step.action == "advance_clock") return;
  if (step.action == "create_nook") {
    NookDraft d;
    d.creator = user("as");
    d.topic = get_string(a, "topic", where);
    d.initial_thoughts = get_string(a, "initial_thoughts", where, "");
    d.channel_title = get_string(a, "channel_title", where, title_from_topic(d.topic));
    for (const auto& u : a.value("excluded", json::array())) d.excluded.insert(UserId(u.get<std::string>()));
    d.require_two_others = a.value("require_two_others", false);
    NookId id = retrying([&] { return ws_->create_nook(d); });
    if (a.contains("label")) labels_.insert_or_assign(get_string(a, "label", where), id);
  } else if (step.action == "respond") {
    auto choice = parse_choice(get_string(a, "choice", where));
    if (!choice) parse_error(where + ": choice must be interested or not_for_me");
    retrying([&] { ws_->respond(nook_ref(a, where), user("as"), *choice); return 0; });
  } else if (step.action == "post_message") {
    const int repeat = a.value("repeat", 1);
    for (int i = 0; i < repeat; ++i) ws_->post_message(nook_ref(a, where), user("as"), get_string(a, "body", where));
  } else if (step.action == "unarchive") {
    retrying([&] { ws_->unarchive(nook_ref(a, where), user("as")); return 0; });
  } else if (step.action == "add_member") {
    retrying([&] { ws_->add_member(nook_ref(a, where), user("as"), user("user")); return 0; });
  } else if (step.action == "send_direct") {
    ws_->send_user_direct(user("as"), user("to"), get_string(a, "body", where));
  } else if (step.action == "onboard") {
    if (a.contains("channel")) {
      retrying([&] { return ws_->onboard_channel(get_string(a, "channel", where)); });
    } else {
      std::vector<UserId> users;
      for (const auto& u : a.value("users", json::array())) users.emplace_back(u.get<std::string>());
      retrying([&] { return ws_->onboard_users(users); });
    }
  } else if (step.action == "signup") {
    const UserId u = user("user");
    auto code = ws_->state().invites.find(u);
    const std::string invite = code == ws_->state().invites.end() ? "" : code->second;
    retrying([&] {
      return ws_->signup(invite, get_string(a, "name", where, u.str()), {}, a.value("consent", true));
    });
  } else if (step.action == "seed_predefined") {
    std::vector<PredefinedNook> list;
    const LocalDate start_day = zone_.local_date(start_);
    for (const auto& n : a.value("nooks", json::array())) {
      PredefinedNook p;
      p.topic = get_string(n, "topic", where);
      p.initial_thoughts = get_string(n, "initial_thoughts", where, "");
      p.channel_title = get_string(n, "channel_title", where, "");
      if (n.contains("batch_date")) {
        auto d = parse_date(get_string(n, "batch_date", where));
        if (!d) parse_error(where + ": bad batch_date");
        p.batch_date = *d;
      } else {
        p.batch_date = LocalDate{std::chrono::sys_days(start_day) + std::chrono::days(n.value("batch_offset_days", 0))};
      }
      list.push_back(std::move(p));
    }
    auto ids = retrying([&] { return ws_->seed_predefined(list, get_string(a, "marker", where, "scenario")); });
    auto labels = a.value("labels", json::array());
    for (std::size_t i = 0; i < labels.size() && i < ids.size(); ++i) labels_.insert_or_assign(labels[i].get<std::string>(), ids[i]);
  } else if (step.action == "set_schedule") {
    ScheduleConfig s = apply_schedule_fields(ws_->state().schedule, a, where);
    retrying([&] { ws_->set_schedule(s); return 0; });
  } else if (step.action == "set_samples") {
    std::vector<SampleNook> samples;
    for (const auto& s : a.value("samples", json::array())) {
      samples.push_back({get_string(s, "topic", where), get_string(s, "initial_thoughts", where, "")});
    }
    retrying([&] { ws_->set_samples(samples); return 0; });
  } else if (step.action == "platform_fail") {
    chat_.fail_next(a.value("count", 1));
  } else if (step.action == "crash_restart") {
    restart();
  } else if (step.action == "inject_crash") {
    pending_crashes_.insert(ws_->state().next_sequence + a.value("after_appends", 0));
  } else {
    parse_error("unknown action " + step.action);
  }
}

std::optional<std::string> event_nook(const json& e) {
  const json& d = e.at("data");
  if (auto it = d.find("nook_id"); it != d.end()) return it->get<std::string>();
  if (auto it = d.find("response"); it != d.end() && it->contains("nook_id")) return (*it)["nook_id"].get<std::string>();
  return std::nullopt;
}

bool event_mentions(const json& e, const std::string& nook) {
  if (auto n = event_nook(e); n && *n == nook) return true;
  const json& d = e.at("data");
  if (auto it = d.find("nooks"); it != d.end()) {
    for (const auto& n : *it) {
      if (n == nook) return true;
    }
  }
  return false;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json users_json(const UserSet& users) {
  json out = json::array();
  for (const auto& u : users) out.push_back(u.str());
  return out;
}

json Runner::evaluate(const json& x, std::size_t index) {
  const std::string type = x.value("type", "");
  const std::string where = "expectation " + std::to_string(index);
  const WorkspaceState& st = ws_->state();
  json expected, actual;

  if (type == "nook_state" || type == "nook_state_at") {
    const NookId id = nook_ref(x, where);
    WorkspaceState view;
    if (type == "nook_state_at") {
      const Instant at = start_ + parse_offset(x.at("at"), where);
      std::vector<LogEvent> prefix;
      for (auto& e : log_events()) {
        if (e.occurred_at <= at) prefix.push_back(std::move(e));
      }
      view = fold(prefix);
    }
    const WorkspaceState& source = type == "nook_state_at" ? view : st;
    const Nook* n = source.find_nook(id);
    expected = json{{"state", x.at("state")}};
    actual = json{{"state", n ? json(to_string(n->state)) : json(nullptr)}};
    if (x.contains("reason")) {
      expected["reason"] = x["reason"];
      actual["reason"] = n && n->not_activated_reason ? json(to_string(*n->not_activated_reason)) : json(nullptr);
    }
  } else if (type == "channel_members") {
    const ChannelRecord* ch = st.find_channel(nook_ref(x, where));
    UserSet want;
    for (const auto& u : x.at("members")) want.insert(UserId(u.get<std::string>()));
    expected = users_json(want);
    actual = ch ? users_json(ch->members) : json(nullptr);
    if (ch) actual = users_json(chat_.members_of(ch->channel_handle)) == actual ? actual : json("platform disagrees");
  } else if (type == "event_count" || type == "event_at") {
    const std::string name = x.at("event").get<std::string>();
    const std::optional<std::string> nook =
        x.contains("nook") ? std::optional(nook_ref(x, where).str()) : std::nullopt;
    std::vector<json> hits;
    for (const auto& e : log_events()) {
      json j = to_json(e);
      if (j["type"] != name) continue;
      if (nook && !event_mentions(j, *nook)) continue;
      hits.push_back(std::move(j));
    }
    if (type == "event_count") {
      expected = x.at("count");
      actual = hits.size();
    } else {
      expected = format_instant(start_ + parse_offset(x.at("at"), where));
      actual = hits.empty() ? json(nullptr) : hits.front()["at"];
    }
  } else if (type == "direct_messages") {
    int count = 0;
    for (const auto& m : chat_.all_direct_messages()) {
      if (x.contains("to") && m.to.str() != x["to"].get<std::string>()) continue;
      if (x.contains("text") && m.body != x["text"].get<std::string>()) continue;
      if (x.contains("contains") && m.body.find(x["contains"].get<std::string>()) == std::string::npos) continue;
      ++count;
    }
    expected = x.at("count");
    actual = count;
  } else if (type == "channel_messages" || type == "greeting") {
    const ChannelRecord* ch = st.find_channel(nook_ref(x, where));
    std::vector<ChatMessage> msgs;
    if (ch) {
      for (const auto& m : chat_.all_channel_messages()) {
        if (m.channel == ch->channel_handle) msgs.push_back(m);
      }
    }
    if (type == "greeting") {
      expected = x.at("text");
      actual = !msgs.empty() && !msgs.front().author ? json(msgs.front().body) : json(nullptr);
    } else {
      int count = 0;
      for (const auto& m : msgs) {
        if (x.contains("contains") && m.body.find(x["contains"].get<std::string>()) == std::string::npos) continue;
        ++count;
      }
      expected = x.at("count");
      actual = count;
    }
  } else if (type == "private_channels") {
    expected = x.at("count");
    actual = chat_.private_channel_count();
  } else if (type == "log_contains" || type == "log_excludes" || type == "export_contains" ||
             type == "export_excludes") {
    const std::string text = x.at("text").get<std::string>();
    const std::string haystack = type.rfind("log", 0) == 0 ? read_file(dir_ / "events.log")
                                                            : export_participation_log(st);
    std::size_t hits = 0;
    for (auto pos = haystack.find(text); pos != std::string::npos; pos = haystack.find(text, pos + 1)) ++hits;
    const bool want = type.find("contains") != std::string::npos;
    expected = want ? json("present") : json(0);
    actual = want ? json(hits > 0 ? "present" : "absent") : json(hits);
  } else {
    parse_error(where + ": unknown expectation type " + type);
  }

  json result{{"index", index}, {"type", type}, {"pass", expected == actual}};
  for (const char* key : {"nook", "event", "at", "to", "text", "contains"}) {
    if (x.contains(key)) result[key] = x[key];
  }
  if (expected != actual) result["diff"] = json{{"expected", expected}, {"actual", actual}};
  return result;
}

RunResult Runner::run() {
  RunResult result;
  json steps = json::array();
  json expectations = json::array();

  // An empty scenario produces an empty report and touches nothing.
  const bool empty = sc_.script.empty() && sc_.expectations.empty() && sc_.members.empty() && !sc_.end;
  if (!empty) {
    setup();
    for (std::size_t i = 0; i < sc_.script.size(); ++i) {
      const Step& step = sc_.script[i];
      advance_to(start_ + step.at);
      json entry{{"index", i}, {"at", offset_string(step.at)}, {"action", step.action}};
      std::optional<std::string> error;
      try {
        execute(step);
      } catch (const NooksError& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        error = std::string(to_string(e.code()));
      }
      const bool ok = error == step.expect_error;
      entry["outcome"] = error ? *error : "ok";
      entry["pass"] = ok;
      if (!ok) result.passed = false;
      steps.push_back(entry);
    }
    Duration end = sc_.script.empty() ? Duration{0} : sc_.script.back().at;
    if (sc_.end) end = *sc_.end;
    advance_to(start_ + end);

    for (std::size_t i = 0; i < sc_.expectations.size(); ++i) {
      json r = evaluate(sc_.expectations[i], i);
      if (!r["pass"].get<bool>()) result.passed = false;
      expectations.push_back(std::move(r));
    }
    result.final_state = ws_->state();
  }

  result.restarts = restarts_;
  result.report = json{{"scenario", sc_.name},
                       {"steps", steps},
                       {"expectations", expectations},
                       {"tick_failures", tick_failures_},
                       {"passed", result.passed}};

  std::filesystem::create_directories(opts_.out_dir);
  std::ofstream(opts_.out_dir / "report.json") << result.report.dump(2) << '\n';
  std::ofstream traffic(opts_.out_dir / "traffic.jsonl");
  for (const auto& t : chat_.traffic()) traffic << t.dump() << '\n';
  if (ws_) std::ofstream(opts_.out_dir / "participation.log") << export_participation_log(ws_->state());
  ws_.reset();
  return result;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) parse_error("scenario must be a JSON object");
  Scenario sc;
  try {
    sc.name = doc.value("name", "");
    sc.seed = doc.value("seed", std::uint64_t{0});
    sc.schedule = apply_schedule_fields(sc.schedule, doc.value("schedule", json::object()), "schedule");
    if (doc.contains("timezone")) sc.schedule.timezone = doc["timezone"].get<std::string>();
    validate_schedule(sc.schedule);
    sc.start_local = doc.value("start", sc.start_local);
    resolve_local(sc.start_local, Zone(sc.schedule.timezone));
    if (doc.contains("admin")) sc.admin = UserId(doc["admin"].get<std::string>());
    for (const auto& m : doc.value("members", json::array())) {
      MemberStub stub;
      stub.id = UserId(get_string(m, "id", "members"));
      if (!is_valid_user_id(stub.id.str())) parse_error("members: bad user id " + stub.id.str());
      stub.name = get_string(m, "name", "members", stub.id.str());
      stub.demographics = m.value("demographics", std::map<std::string, std::string>{});
      stub.onboard = m.value("onboard", true);
      sc.members.push_back(std::move(stub));
    }
    Duration last{0};
    std::size_t index = 0;
    for (const auto& s : doc.value("script", json::array())) {
      const std::string where = "script[" + std::to_string(index++) + "]";
      Step step;
      step.at = parse_offset(s.value("at", json("+0s")), where);
      if (step.at < last) parse_error(where + ": steps must be in time order");
      last = step.at;
      step.action = get_string(s, "action", where);
      if (!kActions.contains(step.action)) parse_error(where + ": unknown action " + step.action);
      if (s.contains("expect_error")) step.expect_error = get_string(s, "expect_error", where);
      step.args = s;
      sc.script.push_back(std::move(step));
    }
    if (doc.contains("end")) {
      sc.end = parse_offset(doc["end"], "end");
      if (*sc.end < last) parse_error("end is before the last step");
    }
    for (const auto& x : doc.value("expectations", json::array())) {
      const std::string type = get_string(x, "type", "expectations");
      if (!kExpectations.contains(type)) parse_error("expectations: unknown type " + type);
      sc.expectations.push_back(x);
    }
  } catch (const json::exception& e) {
    parse_error(std::string("scenario: ") + e.what());
  } catch (const NooksError& e) {
    if (e.code() != ErrorCode::InvalidConfig) throw;
    parse_error(std::string("scenario schedule: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) parse_error("cannot read scenario " + file.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) parse_error("scenario is not valid JSON: " + file.string());
  return parse_scenario(doc);
}

RunResult run(const Scenario& scenario, const RunOptions& options) { return Runner(scenario, options).run(); }

}  // namespace nooks::sim
