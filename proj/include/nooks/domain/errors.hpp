#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nooks {

enum class ErrorCode {
  // draft validation
  EmptyTitle,
  TitleTooLong,
  TitleBadCharset,
  EmptyTopic,
  SelfExclusion,
  UnknownExcludedUser,
  // lifecycle
  ExcludedUser,
  ResponseWindowClosed,
  NotIncubating,
  NotOnboarded,
  ConsentRequired,
  AlreadyOnboarded,
  UnknownInvite,
  BatchAlreadyOpened,
  DuplicateSeed,
  // channels
  NotAMember,
  AlreadyMember,
  AlreadyArchived,
  AlreadyActive,
  ChannelArchived,
  NameCollision,
  UnknownUser,
  UnknownChannel,
  UnknownNook,
  EmptyMemberSet,
  PlatformFailure,
  // persistence
  StorageFull,
  RedactionViolation,
  CorruptRecord,
  CorruptState,
  WorkspaceBusy,
  NotInstalled,
  AlreadyInstalled,
  // configuration and input
  InvalidConfig,
  ParseError,
  Unauthenticated,
  Forbidden,
};

std::string_view to_string(ErrorCode code);

class NooksError : public std::runtime_error {
 public:
  NooksError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  explicit NooksError(ErrorCode code)
      : std::runtime_error(std::string(to_string(code))), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nooks
