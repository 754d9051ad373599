#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>

#include "nooks/domain/types.hpp"

namespace nooks {

struct SessionToken {
  std::string bearer;
  UserId user_id;
  Instant issued_at{};
  bool admin = false;
};

/// Bearer tokens, optionally mirrored to a 0600 file of
/// `<token> <user_id> <admin 0|1> <issued_at>` lines. Tokens are not part of
/// the event log. Lookups that miss re-read the file, so tokens issued by
/// `nooksctl issue-token` reach a running server.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> file = std::nullopt,
                        std::optional<std::uint64_t> seed = std::nullopt);

  SessionToken issue(const UserId& user, bool admin, Instant now);
  std::optional<SessionToken> find(const std::string& bearer);

 private:
  void reload();
  void append_to_file(const SessionToken& token) const;

  std::optional<std::filesystem::path> file_;
  std::mutex mu_;
  std::mt19937_64 rng_;
  std::map<std::string, SessionToken> tokens_;
};

}  // namespace nooks
