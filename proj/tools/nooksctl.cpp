// nooksctl: operator tooling and the scenario runner.
//
// Exit codes: 0 success, 1 failure (failed expectation or refused command),
// 2 usage error (bad flags or unreadable input).

#include <zlib.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nooks/api/http_server.hpp"
#include "nooks/persistence/participation_log.hpp"
#include "nooks/platform/localchat.hpp"
#include "nooks/service/config.hpp"
#include "nooks/service/predefined_file.hpp"
#include "nooks/sim/scenario.hpp"

namespace {

using namespace nooks;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

/// Everything a command needs to act on one installed workspace.
struct Opened {
  Config config;
  SystemClock clock;
  std::unique_ptr<LocalChat> chat;
  std::unique_ptr<Workspace> ws;

  std::filesystem::path dir() const { return config.workspace_dir(); }
};

Workspace::Options workspace_options(const Config& cfg) {
  Workspace::Options o;
  o.log.fsync = cfg.fsync;
  o.seed = random_seed();
  return o;
}

std::unique_ptr<Opened> open_workspace(const Config& cfg) {
  auto o = std::make_unique<Opened>();
  o->config = cfg;
  o->chat = std::make_unique<LocalChat>(o->clock, cfg.workspace_dir() / "localchat.json");
  o->ws = Workspace::open(cfg.workspace_dir(), *o->chat, o->clock, workspace_options(cfg));
  return o;
}

// Directory file for the local chat platform:
//   {"users": [{"id": "alice", "name": "Alice"}], "channels": [{"name": "general", "members": ["alice"]}]}
void load_directory(LocalChat& chat, const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw UsageError(path + ": not a JSON object");
  try {
    for (const auto& u : doc.value("users", json::array())) {
      const std::string id = u.at("id").get<std::string>();
      if (!is_valid_user_id(id)) throw UsageError(path + ": bad user id '" + id + "'");
      chat.add_user(UserId(id), u.value("name", id));
    }
    for (const auto& c : doc.value("channels", json::array())) {
      UserSet members;
      for (const auto& m : c.at("members")) members.insert(UserId(m.get<std::string>()));
      chat.add_public_channel(c.at("name").get<std::string>(), members);
    }
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

SessionStore session_store(const Config& cfg) { return SessionStore(cfg.workspace_dir() / "sessions"); }

std::atomic<HttpServer*> g_server{nullptr};

void handle_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nooks workspace administration"};
  app.require_subcommand(1);

  std::string config_file;
  std::string data_dir;
  std::string workspace;
  app.add_option("--config", config_file, "Config file (default: $NOOKS_CONFIG)");
  app.add_option("--data-dir", data_dir, "Override data_dir from the config");

  auto workspace_opt = [&](CLI::App* cmd) { cmd->add_option("--workspace,-w", workspace, "Workspace name"); };

  // install
  auto* install = app.add_subcommand("install", "Create a workspace and its admin");
  workspace_opt(install);
  std::string admin, directory;
  install->add_option("--admin", admin, "Platform user who administers the workspace")->required();
  install->add_option("--directory", directory, "JSON directory of platform users and channels");

  // add-user
  auto* add_user = app.add_subcommand("add-user", "Register a user on the local chat platform");
  workspace_opt(add_user);
  std::string user_id, user_name;
  add_user->add_option("--id", user_id, "Platform user id")->required();
  add_user->add_option("--name", user_name, "Display name");

  // onboard
  auto* onboard = app.add_subcommand("onboard", "Invite members by channel or user list");
  workspace_opt(onboard);
  std::string channel, users;
  auto* channel_opt = onboard->add_option("--channel", channel, "Invite every member of this channel");
  auto* users_opt = onboard->add_option("--users", users, "Comma-separated user ids");
  channel_opt->excludes(users_opt);
  onboard->callback([&] {
    if (channel.empty() && users.empty()) throw CLI::ValidationError("one of --channel or --users is required");
  });

  // seed-predefined
  auto* seed = app.add_subcommand("seed-predefined", "Insert predefined nooks from a file");
  workspace_opt(seed);
  std::string seed_file, seed_marker;
  seed->add_option("--file", seed_file, "One nook per line: date | topic [| thoughts [| title]]")->required();
  seed->add_option("--marker", seed_marker, "Idempotence marker (default: checksum of the file)");

  // set-schedule
  auto* schedule = app.add_subcommand("set-schedule", "Change the workspace schedule");
  workspace_opt(schedule);
  std::string tz, cutoff, activation, lifetime;
  int min_members = 0;
  schedule->add_option("--timezone", tz, "IANA zone name");
  schedule->add_option("--batch-cutoff", cutoff, "HH:MM local");
  schedule->add_option("--activation-time", activation, "HH:MM local");
  schedule->add_option("--channel-lifetime", lifetime, "Like 24h or 2d");
  schedule->add_option("--min-members", min_members, "Members needed to open a channel")->check(CLI::PositiveNumber);

  // export-log
  auto* export_log = app.add_subcommand("export-log", "Print the participation log");
  workspace_opt(export_log);
  bool with_demographics = false;
  std::string export_out;
  export_log->add_flag("--demographics", with_demographics, "Append member demographics");
  export_log->add_option("--out", export_out, "Write to a file instead of stdout");

  // issue-token
  auto* token = app.add_subcommand("issue-token", "Issue an API bearer token for a member");
  workspace_opt(token);
  std::string token_user;
  token->add_option("--user", token_user, "Onboarded member id")->required();

  // tick
  auto* tick = app.add_subcommand("tick", "Run every scheduled event that is due now");
  workspace_opt(tick);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  workspace_opt(serve);
  std::string listen, static_dir;
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--static-dir", static_dir, "Serve files from this directory at /");

  // sim
  auto* sim_cmd = app.add_subcommand("sim", "Run a scenario on a virtual clock");
  std::string scenario_file, out_dir, crash_at;
  sim_cmd->add_option("--scenario", scenario_file, "Scenario JSON file")->required();
  sim_cmd->add_option("--out", out_dir, "Directory for the log, report and traffic")->required();
  sim_cmd->add_option("--crash-before", crash_at, "Comma-separated sequences to crash before");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (sim_cmd->parsed()) {
      sim::Scenario sc = sim::load_scenario(scenario_file);
      sim::RunOptions opts;
      opts.out_dir = out_dir;
      for (const auto& s : split_list(crash_at)) opts.crash_before_sequences.insert(std::stoull(s));
      auto result = sim::run(sc, opts);
      for (const auto& step : result.report["steps"]) {
        if (!step["pass"].get<bool>()) {
          std::cout << "FAIL step " << step["index"] << " " << step["action"].get<std::string>() << " -> "
                    << step["outcome"].get<std::string>() << '\n';
        }
      }
      for (const auto& x : result.report["expectations"]) {
        std::cout << (x["pass"].get<bool>() ? "PASS " : "FAIL ") << x["index"] << ' ' << x["type"].get<std::string>();
        if (x.contains("diff")) std::cout << ' ' << x["diff"].dump();
        std::cout << '\n';
      }
      std::cout << (result.passed ? "scenario passed" : "scenario FAILED") << '\n';
      return result.passed ? kOk : kFailed;
    }

    Config cfg = config_file.empty() ? config_from_env() : load_config(config_file);
    if (!data_dir.empty()) cfg.data_dir = data_dir;
    if (!workspace.empty()) cfg.workspace = workspace;

    if (install->parsed()) {
      SystemClock clock;
      std::filesystem::create_directories(cfg.workspace_dir());
      LocalChat chat(clock, cfg.workspace_dir() / "localchat.json");
      if (!directory.empty()) load_directory(chat, directory);
      if (!chat.has_user(UserId(admin))) chat.add_user(UserId(admin), admin);
      auto ws = Workspace::install(cfg.workspace_dir(), cfg.workspace, UserId(admin), cfg.schedule, chat, clock,
                                   workspace_options(cfg));
      auto t = session_store(cfg).issue(UserId(admin), true, clock.now());
      std::cout << "installed " << cfg.workspace << " at " << cfg.workspace_dir().string() << '\n'
                << "admin token: " << t.bearer << '\n';
      return kOk;
    }

    auto o = open_workspace(cfg);
    Workspace& ws = *o->ws;

    if (add_user->parsed()) {
      if (!is_valid_user_id(user_id)) throw UsageError("bad user id '" + user_id + "'");
      o->chat->add_user(UserId(user_id), user_name.empty() ? user_id : user_name);
    } else if (onboard->parsed()) {
      std::vector<UserId> invited;
      if (!channel.empty()) {
        invited = ws.onboard_channel(channel);
      } else {
        std::vector<UserId> targets;
        for (const auto& u : split_list(users)) targets.emplace_back(u);
        invited = ws.onboard_users(targets);
      }
      for (const auto& u : invited) std::cout << "invited " << u.str() << '\n';
    } else if (seed->parsed()) {
      const std::string text = read_file(seed_file);
      std::vector<PredefinedNook> nooks;
      try {
        nooks = parse_predefined_file(text);
      } catch (const NooksError& e) {
        throw UsageError(seed_file + ": " + e.what());
      }
      if (seed_marker.empty()) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "file-%08lx",
                      crc32(0L, reinterpret_cast<const Bytef*>(text.data()), static_cast<uInt>(text.size())));
        seed_marker = buf;
      }
      for (const auto& id : ws.seed_predefined(nooks, seed_marker)) std::cout << "seeded " << id.str() << '\n';
    } else if (schedule->parsed()) {
      ScheduleConfig s = ws.state().schedule;
      if (!tz.empty()) s.timezone = tz;
      auto time_arg = [](const std::string& v, TimeOfDay& out, const char* flag) {
        if (v.empty()) return;
        auto t = parse_time_of_day(v);
        if (!t) throw UsageError(std::string(flag) + " must be HH:MM");
        out = *t;
      };
      time_arg(cutoff, s.batch_cutoff, "--batch-cutoff");
      time_arg(activation, s.activation_time, "--activation-time");
      if (!lifetime.empty()) {
        auto d = parse_duration(lifetime);
        if (!d) throw UsageError("--channel-lifetime must look like 24h");
        s.channel_lifetime = *d;
      }
      if (min_members > 0) s.min_members_to_activate = min_members;
      ws.set_schedule(s);
      std::cout << schedule_to_json(ws.state().schedule).dump() << '\n';
    } else if (export_log->parsed()) {
      const std::string text = export_participation_log(ws.state(), with_demographics);
      if (export_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(export_out) << text;
      }
    } else if (token->parsed()) {
      const UserId u(token_user);
      if (!ws.state().is_onboarded(u)) throw NooksError(ErrorCode::NotOnboarded, token_user + " is not a member");
      std::cout << session_store(cfg).issue(u, u == ws.state().admin, o->clock.now()).bearer << '\n';
    } else if (tick->parsed()) {
      auto report = ws.tick();
      for (const auto& e : report.executed) std::cout << "ran " << e.describe() << '\n';
      for (const auto& f : report.failures) std::cout << "failed " << f.event.describe() << ": " << f.error << '\n';
      return report.failures.empty() ? kOk : kFailed;
    } else if (serve->parsed()) {
      if (!listen.empty()) {
        auto colon = listen.rfind(':');
        if (colon == std::string::npos) throw UsageError("--listen must be host:port");
        cfg.listen_host = listen.substr(0, colon);
        cfg.listen_port = std::stoi(listen.substr(colon + 1));
      }
      if (!static_dir.empty()) cfg.static_dir = static_dir;
      Service service(ws);
      SessionStore sessions = session_store(cfg);
      Api api(service, sessions);
      HttpServer server(api, service,
                        {cfg.listen_host, cfg.listen_port, cfg.static_dir, std::chrono::seconds(cfg.tick_seconds)});
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      std::cout << "listening on " << cfg.listen_host << ':' << cfg.listen_port << std::endl;
      if (!server.run()) throw UsageError("cannot listen on " + cfg.listen_host + ":" + std::to_string(cfg.listen_port));
      g_server = nullptr;
    }
    return kOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const NooksError& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidConfig ? kUsage : kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
}
