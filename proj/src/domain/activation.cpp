#include "nooks/domain/activation.hpp"

#include <cstdio>

namespace nooks {

ActivationDecision compute_member_set(const Nook& nook, std::span<const InterestResponse> responses,
                                      const ScheduleConfig& schedule) {
  const auto finals = final_choices(responses);
  const UserId& creator = nook.creator();
  const bool has_creator = nook.origin == NookOrigin::Member;

  UserSet members;
  for (const auto& [user, response] : finals) {
    if (response.choice == Choice::Interested && !nook.excludes(user)) members.insert(user);
  }
  if (has_creator) {
    auto own = finals.find(creator);
    const bool opted_out = own != finals.end() && own->second.choice == Choice::NotForMe;
    if (opted_out) {
      members.erase(creator);
    } else {
      members.insert(creator);
    }
  }

  if (nook.draft.require_two_others) {
    const auto others = members.size() - (has_creator && members.contains(creator) ? 1 : 0);
    if (others < 2) return NotActivated{NotActivatedReason::InsufficientOthers};
  }
  if (members.size() < static_cast<std::size_t>(schedule.min_members_to_activate)) {
    return NotActivated{NotActivatedReason::TooFewMembers};
  }
  return Activate{std::move(members)};
}

std::string format_clock_12h(std::chrono::seconds since_midnight) {
  const long total = since_midnight.count() % 86400;
  const long hour = total / 3600;
  const long minute = (total % 3600) / 60;
  const long hour12 = hour % 12 == 0 ? 12 : hour % 12;
  const char* suffix = hour < 12 ? "AM" : "PM";
  char buf[16];
  if (minute == 0) {
    std::snprintf(buf, sizeof buf, "%ld%s", hour12, suffix);
  } else {
    std::snprintf(buf, sizeof buf, "%ld:%02ld%s", hour12, minute, suffix);
  }
  return buf;
}

std::string greeting_message(const Nook& nook, const ScheduleConfig& schedule) {
  const Zone zone(schedule.timezone);
  const Instant activated = activation_at(nook.batch_date, schedule);
  const Instant archived = activated + schedule.channel_lifetime;

  const auto days_apart =
      (std::chrono::sys_days(zone.local_date(archived)) - std::chrono::sys_days(zone.local_date(activated))).count();
  std::string when = format_clock_12h(zone.local_time_of_day(archived));
  if (days_apart == 0) {
    when += " today";
  } else if (days_apart == 1) {
    when += " tomorrow";
  } else {
    when += " on " + format_date(zone.local_date(archived));
  }

  std::string text = "Super-excited to hear all of your thoughts on " + nook.draft.topic + ". ";
  if (!nook.draft.initial_thoughts.empty()) text += nook.draft.initial_thoughts + " ";
  text += "Remember this chat will be automatically archived at " + when;
  return text;
}

std::string not_activated_notice(const Nook& nook, NotActivatedReason reason) {
  std::string text = "Your nook \"" + nook.draft.topic + "\" was not launched this time: ";
  if (reason == NotActivatedReason::InsufficientOthers) {
    text += "fewer than two other members expressed interest, so launching it could have revealed you.";
  } else {
    text += "not enough members expressed interest.";
  }
  return text;
}

std::string archive_notice(const std::string& channel_name) {
  return "The nook #" + channel_name +
         " has been archived. Any member can unarchive it to keep the conversation going.";
}

std::string invite_message(const std::string& invite_code) {
  return "You've been invited to Nooks! Sign up with invite code " + invite_code +
         " and you'll be walked through the consent form before you start.";
}

}  // namespace nooks
