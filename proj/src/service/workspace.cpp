#include "nooks/service/workspace.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <functional>
#include <random>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

std::string channel_key(const NookId& id) { return "activate:" + id.str(); }

}  // namespace

std::string title_from_topic(std::string_view topic) {
  std::string out;
  bool pending_dash = false;
  for (unsigned char c : topic) {
    if (std::isalpha(c) && c < 0x80) {
      if (pending_dash && !out.empty()) out += '-';
      pending_dash = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_dash = true;
    }
  }
  if (out.size() >= kMaxChannelTitleLength) out.resize(kMaxChannelTitleLength - 1);
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "nook" : out;
}

Workspace::Workspace(EventLog log, WorkspaceState state, ChatPlatform& platform, const Clock& clock,
                     Options options)
    : log_(std::move(log)),
      state_(std::move(state)),
      snapshots_(log_.directory()),
      platform_(platform),
      clock_(clock),
      options_(std::move(options)) {
  if (options_.before_append) log_.set_before_append_hook(options_.before_append);
}

std::unique_ptr<Workspace> Workspace::install(const std::filesystem::path& dir, const std::string& workspace_id,
                                              const UserId& admin, const ScheduleConfig& schedule,
                                              ChatPlatform& platform, const Clock& clock, Options options) {
  validate_schedule(schedule);
  if (!platform.has_user(admin)) throw NooksError(ErrorCode::UnknownUser, "admin is not a platform user: " + admin.str());
  auto log = EventLog::open(dir, options.log);
  // An install interrupted part-way is finished rather than rejected.
  WorkspaceState state = fold(log.load(0));
  const bool complete = state.installed && state.is_onboarded(state.admin);
  if (complete) throw NooksError(ErrorCode::AlreadyInstalled, "workspace already installed in " + dir.string());
  if (state.installed && state.admin != admin) {
    throw NooksError(ErrorCode::AlreadyInstalled, "partial install for another admin in " + dir.string());
  }

  std::unique_ptr<Workspace> ws(new Workspace(std::move(log), std::move(state), platform, clock, options));
  if (!ws->state_.installed) ws->commit(events::ConfigChanged{workspace_id, admin, schedule, default_samples()});
  if (!ws->state_.members.contains(admin)) {
    MemberProfile profile{admin, platform.display_name(admin).value_or(admin.str()), false, {}, clock.now()};
    ws->commit(events::MemberOnboarded{profile});
  }
  ws->commit(events::ConsentRecorded{admin});
  return ws;
}

std::unique_ptr<Workspace> Workspace::open(const std::filesystem::path& dir, ChatPlatform& platform,
                                           const Clock& clock, Options options) {
  if (!std::filesystem::exists(dir / "events.log")) {
    throw NooksError(ErrorCode::NotInstalled, "no workspace at " + dir.string());
  }
  auto log = EventLog::open(dir, options.log);
  if (log.next_sequence() == 0) throw NooksError(ErrorCode::NotInstalled, "empty workspace log in " + dir.string());

  WorkspaceState state;
  if (auto snap = SnapshotStore(dir).latest()) {
    try {
      WorkspaceState candidate = state_from_json(snap->second);
      if (candidate.next_sequence <= log.next_sequence()) state = std::move(candidate);
    } catch (const NooksError&) {
      // unusable snapshot; fold from the start
    }
  }
  state = fold(log.load(state.next_sequence), std::move(state));
  reconcile(state, clock.now());
  return std::unique_ptr<Workspace>(new Workspace(std::move(log), std::move(state), platform, clock, options));
}

void Workspace::commit(events::Payload payload) {
  const Instant at = clock_.now();
  const auto seq = log_.append(at, payload);
  apply(state_, LogEvent{seq, at, std::move(payload)});
  if (state_.next_sequence % kSnapshotInterval == 0) snapshots_.write(state_.next_sequence - 1, state_to_json(state_));
}

void Workspace::require_onboarded(const UserId& user) const {
  if (!state_.is_onboarded(user)) throw NooksError(ErrorCode::NotOnboarded, "not an onboarded member: " + user.str());
}

std::string Workspace::new_invite_code(const UserId& user) const {
  std::seed_seq seq{static_cast<std::uint32_t>(options_.seed), static_cast<std::uint32_t>(options_.seed >> 32),
                    static_cast<std::uint32_t>(std::hash<std::string>{}(user.str())),
                    static_cast<std::uint32_t>(state_.next_sequence)};
  std::mt19937_64 rng(seq);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

void Workspace::invite(const UserId& user) {
  if (state_.members.contains(user)) return;
  auto it = state_.invites.find(user);
  std::string code;
  if (it == state_.invites.end()) {
    code = new_invite_code(user);
    commit(events::MemberInvited{user, code});
  } else {
    code = it->second;
  }
  platform_.send_direct(user, invite_message(code), "invite");
}

std::vector<UserId> Workspace::onboard_channel(std::string_view channel_name) {
  const UserSet members = platform_.channel_members_by_name(channel_name);
  return onboard_users(std::vector<UserId>(members.begin(), members.end()));
}

std::vector<UserId> Workspace::onboard_users(const std::vector<UserId>& users) {
  for (const auto& u : users) {
    if (!platform_.has_user(u)) throw NooksError(ErrorCode::UnknownUser, "unknown user " + u.str());
  }
  std::vector<UserId> targeted;
  for (const auto& u : users) {
    invite(u);
    targeted.push_back(u);
  }
  return targeted;
}

MemberProfile Workspace::signup(const std::string& invite_code, const std::string& display_name,
                                const std::map<std::string, std::string>& demographics, bool consent) {
  auto it = std::find_if(state_.invites.begin(), state_.invites.end(),
                         [&](const auto& kv) { return kv.second == invite_code; });
  if (invite_code.empty() || it == state_.invites.end()) throw NooksError(ErrorCode::UnknownInvite);
  const UserId user = it->first;
  if (!consent) throw NooksError(ErrorCode::ConsentRequired, "the consent form must be accepted to sign up");
  if (auto m = state_.members.find(user); m != state_.members.end()) {
    if (m->second.consented) throw NooksError(ErrorCode::AlreadyOnboarded);
    commit(events::ConsentRecorded{user});  // finishes a signup cut short
    return state_.members.at(user);
  }

  const std::string name = display_name.empty() ? platform_.display_name(user).value_or(user.str()) : display_name;
  commit(events::MemberOnboarded{MemberProfile{user, name, false, demographics, clock_.now()}});
  commit(events::ConsentRecorded{user});
  return state_.members.at(user);
}

NookId Workspace::create_nook(NookDraft draft) {
  require_onboarded(draft.creator);
  auto errors = validate_draft(draft, state_.roster());
  if (!errors.empty()) throw ValidationFailed(std::move(errors));

  const Instant now = clock_.now();
  LocalDate batch = assign_batch(now, state_.schedule);
  // A schedule change can move the cutoff past a batch that already opened.
  batch = std::max(batch, state_.next_batch_to_open());

  char id[32];
  std::snprintf(id, sizeof id, "nk-%04llu", static_cast<unsigned long long>(state_.nook_counter + 1));
  const NookId nook_id{id};
  commit(events::NookCreated{nook_id, std::move(draft), NookOrigin::Member, now, batch, ""});
  return nook_id;
}

std::vector<NookId> Workspace::seed_predefined(const std::vector<PredefinedNook>& nooks,
                                               const std::string& seed_marker) {
  if (seed_marker.empty()) throw NooksError(ErrorCode::ParseError, "seed marker required");
  if (state_.seed_markers.contains(seed_marker)) {
    throw NooksError(ErrorCode::DuplicateSeed, "predefined nooks already seeded from " + seed_marker);
  }
  const LocalDate first_open = state_.next_batch_to_open();
  for (const auto& p : nooks) {
    NookDraft draft{kSystemCreator, p.topic, p.initial_thoughts,
                    p.channel_title.empty() ? title_from_topic(p.topic) : p.channel_title, {}, false};
    auto errors = validate_draft(draft, state_.roster());
    if (!errors.empty()) throw ValidationFailed(std::move(errors));
    if (p.batch_date < first_open) {
      throw NooksError(ErrorCode::BatchAlreadyOpened, "batch " + format_date(p.batch_date) + " has already opened");
    }
  }

  std::vector<NookId> ids;
  for (const auto& p : nooks) {
    char id[32];
    std::snprintf(id, sizeof id, "nk-%04llu", static_cast<unsigned long long>(state_.nook_counter + 1));
    NookDraft draft{kSystemCreator, p.topic, p.initial_thoughts,
                    p.channel_title.empty() ? title_from_topic(p.topic) : p.channel_title, {}, false};
    commit(events::NookCreated{NookId(id), std::move(draft), NookOrigin::Predefined, clock_.now(), p.batch_date,
                               seed_marker});
    ids.emplace_back(id);
  }
  return ids;
}

void Workspace::respond(const NookId& nook_id, const UserId& user, Choice choice) {
  const Nook* nook = state_.find_nook(nook_id);
  if (!nook) throw NooksError(ErrorCode::UnknownNook);
  auto response = record_response(*nook, user, choice, clock_.now(), state_.schedule, state_.is_onboarded(user));
  commit(events::ResponseRecorded{std::move(response)});
}

std::vector<NookCard> Workspace::cards_for(const UserId& viewer) const {
  if (!state_.is_onboarded(viewer)) return {};
  const auto incubating = state_.nooks_in_state(NookState::Incubating);
  return visible_cards(viewer, incubating);
}

std::vector<Encounter> Workspace::top_encounters_for(const UserId& user, std::size_t k) const {
  return top_encounters(state_.encounter_history(), user, k);
}

std::vector<const ChannelRecord*> Workspace::channels_for(const UserId& user) const {
  std::vector<const ChannelRecord*> out;
  for (const auto& [id, ch] : state_.channels) {
    if (ch.members.contains(user)) out.push_back(&ch);
  }
  return out;
}

const ChannelRecord& Workspace::channel_for_member(const NookId& nook, const UserId& user) const {
  const ChannelRecord* ch = state_.find_channel(nook);
  if (!ch || !ch->members.contains(user)) throw NooksError(ErrorCode::NotAMember);
  return *ch;
}

void Workspace::unarchive(const NookId& nook, const UserId& requester) {
  const ChannelRecord& ch = channel_for_member(nook, requester);
  if (!ch.archived) throw NooksError(ErrorCode::AlreadyActive);
  try {
    platform_.unarchive(ChannelRef{ch.channel_handle, ch.channel_name, true, false}, requester);
  } catch (const NooksError& e) {
    // Already live on the platform: a previous attempt got that far.
    if (e.code() != ErrorCode::AlreadyActive) throw;
  }
  commit(events::ChannelUnarchived{nook, requester});
}

void Workspace::add_member(const NookId& nook_id, const UserId& inviter, const UserId& invitee) {
  const ChannelRecord& ch = channel_for_member(nook_id, inviter);
  const Nook& nook = state_.nooks.at(nook_id);
  if (nook.excludes(invitee)) throw NooksError(ErrorCode::ExcludedUser);
  require_onboarded(invitee);
  if (ch.members.contains(invitee)) throw NooksError(ErrorCode::AlreadyMember);
  if (ch.archived) throw NooksError(ErrorCode::ChannelArchived);
  try {
    platform_.add_member(ChannelRef{ch.channel_handle, ch.channel_name, true, true}, inviter, invitee);
  } catch (const NooksError& e) {
    if (e.code() != ErrorCode::AlreadyMember) throw;
  }
  commit(events::MemberAddedToChannel{nook_id, inviter, invitee});
}

ChatMessage Workspace::post_message(const NookId& nook, const UserId& author, std::string_view body) {
  const ChannelRecord& ch = channel_for_member(nook, author);
  if (ch.archived) throw NooksError(ErrorCode::ChannelArchived);
  return platform_.post_message(ChannelRef{ch.channel_handle, ch.channel_name, true, true}, author, body);
}

std::vector<ChatMessage> Workspace::channel_messages(const NookId& nook, const UserId& viewer) const {
  const ChannelRecord& ch = channel_for_member(nook, viewer);
  return platform_.messages(ChannelRef{ch.channel_handle, ch.channel_name, true, !ch.archived}, viewer);
}

void Workspace::send_user_direct(const UserId& from, const UserId& to, std::string_view body) {
  require_onboarded(from);
  require_onboarded(to);
  platform_.send_user_direct(from, to, body);
}

void Workspace::set_schedule(const ScheduleConfig& schedule) {
  validate_schedule(schedule);
  commit(events::ConfigChanged{std::nullopt, std::nullopt, schedule, std::nullopt});
}

void Workspace::set_samples(const std::vector<SampleNook>& samples) {
  if (samples.empty()) throw NooksError(ErrorCode::InvalidConfig, "at least one sample is required");
  commit(events::ConfigChanged{std::nullopt, std::nullopt, std::nullopt, samples});
}

TickReport Workspace::tick() { return scheduler_.tick(clock_.now(), *this); }

void Workspace::open_incubation(LocalDate batch_date, Instant) {
  std::vector<Nook> opening;
  for (const auto& [id, n] : state_.nooks) {
    if (n.state == NookState::Queued && n.batch_date == batch_date) {
      Nook preview = n;
      preview.state = NookState::Incubating;
      opening.push_back(std::move(preview));
    }
  }
  // Notify before recording the opening: if we die half way, the opening is
  // redone and the per-batch dedupe key suppresses repeats.
  const std::string key = "batch:" + format_date(batch_date);
  for (const auto& user : state_.roster()) {
    if (!visible_cards(user, opening).empty()) platform_.send_direct(user, kBatchNotification, key);
  }
  std::vector<NookId> ids;
  for (const auto& n : opening) ids.push_back(n.id);
  commit(events::BatchOpened{batch_date, std::move(ids)});
}

void Workspace::activate_batch(LocalDate batch_date, Instant due_at) {
  std::vector<Nook> batch;
  for (const auto& [id, n] : state_.nooks) {
    if (n.state == NookState::Incubating && n.batch_date == batch_date) batch.push_back(n);
  }
  std::sort(batch.begin(), batch.end(), [](const Nook& a, const Nook& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.id < b.id;
  });

  for (const auto& nook : batch) {
    static const std::vector<InterestResponse> kNone;
    auto rit = state_.responses.find(nook.id);
    const auto& responses = rit == state_.responses.end() ? kNone : rit->second;
    const auto decision = compute_member_set(nook, responses, state_.schedule);

    if (const auto* go = std::get_if<Activate>(&decision)) {
      const ChannelRef ref = platform_.create_private_channel(nook.draft.channel_title, go->members, channel_key(nook.id));
      platform_.post_as_bot(ref, greeting_message(nook, state_.schedule), "greeting");
      commit(events::NookActivated{nook.id, ref.handle, ref.name, go->members, due_at,
                                   due_at + state_.schedule.channel_lifetime});
    } else {
      const auto reason = std::get<NotActivated>(decision).reason;
      if (nook.origin == NookOrigin::Member) {
        platform_.send_direct(nook.creator(), not_activated_notice(nook, reason), "not-activated:" + nook.id.str());
      }
      commit(events::NookNotActivated{nook.id, reason, due_at});
    }
  }
}

void Workspace::archive_channel(const NookId& nook, Instant due_at) {
  const ChannelRecord* ch = state_.find_channel(nook);
  if (!ch || ch->archived || ch->persistent) return;
  try {
    platform_.archive(ChannelRef{ch->channel_handle, ch->channel_name, true, true});
  } catch (const NooksError& e) {
    if (e.code() != ErrorCode::AlreadyArchived) throw;
  }
  const std::string key = "archive:" + nook.str();
  for (const auto& member : ch->members) platform_.send_direct(member, archive_notice(ch->channel_name), key);
  commit(events::ChannelArchived{nook, due_at});
}

}  // namespace nooks
