#pragma once

#include <atomic>

#include "nooks/domain/types.hpp"

namespace nooks {

class Clock {
 public:
  enum class Kind { System, Virtual };

  virtual ~Clock() = default;
  virtual Instant now() const = 0;
  virtual Kind kind() const = 0;
};

class SystemClock final : public Clock {
 public:
  Instant now() const override {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  }
  Kind kind() const override { return Kind::System; }
};

/// Moves only when told to. Time never goes backwards.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Instant start = Instant{}) : now_(start.time_since_epoch().count()) {}

  Instant now() const override { return Instant(std::chrono::seconds(now_.load())); }
  Kind kind() const override { return Kind::Virtual; }

  void set(Instant t) {
    if (t.time_since_epoch().count() > now_.load()) now_ = t.time_since_epoch().count();
  }
  void advance(Duration d) { set(now() + d); }

 private:
  std::atomic<long long> now_;
};

}  // namespace nooks
