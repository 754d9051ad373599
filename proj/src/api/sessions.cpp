#include "nooks/api/sessions.hpp"

#include <sys/stat.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nooks {

SessionStore::SessionStore(std::optional<std::filesystem::path> file, std::optional<std::uint64_t> seed)
    : file_(std::move(file)) {
  if (seed) {
    rng_.seed(*seed);
  } else {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    rng_.seed(seq);
  }
  reload();
}

SessionToken SessionStore::issue(const UserId& user, bool admin, Instant now) {
  std::lock_guard lock(mu_);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()),
                static_cast<unsigned long long>(rng_()));
  SessionToken token{buf, user, now, admin};
  tokens_[token.bearer] = token;
  append_to_file(token);
  return token;
}

std::optional<SessionToken> SessionStore::find(const std::string& bearer) {
  std::lock_guard lock(mu_);
  if (auto it = tokens_.find(bearer); it != tokens_.end()) return it->second;
  reload();
  if (auto it = tokens_.find(bearer); it != tokens_.end()) return it->second;
  return std::nullopt;
}

void SessionStore::reload() {
  if (!file_ || !std::filesystem::exists(*file_)) return;
  std::ifstream in(*file_);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string bearer, user, issued;
    int admin = 0;
    if (!(fields >> bearer >> user >> admin >> issued)) continue;
    tokens_[bearer] = SessionToken{bearer, UserId(user), parse_instant(issued).value_or(Instant{}), admin != 0};
  }
}

void SessionStore::append_to_file(const SessionToken& token) const {
  if (!file_) return;
  const bool fresh = !std::filesystem::exists(*file_);
  {
    std::ofstream out(*file_, std::ios::app);
    out << token.bearer << ' ' << token.user_id.str() << ' ' << (token.admin ? 1 : 0) << ' '
        << format_instant(token.issued_at) << '\n';
  }
  if (fresh) ::chmod(file_->c_str(), 0600);
}

}  // namespace nooks
