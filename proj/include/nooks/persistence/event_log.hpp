#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nooks/domain/errors.hpp"
#include "nooks/persistence/log_event.hpp"

namespace nooks {

class CorruptRecordError : public NooksError {
 public:
  CorruptRecordError(std::uint64_t sequence, const std::string& what)
      : NooksError(ErrorCode::CorruptRecord, what + " in record " + std::to_string(sequence)), sequence_(sequence) {}

  std::uint64_t sequence() const noexcept { return sequence_; }

 private:
  std::uint64_t sequence_;
};

/// Thrown by a crash hook to simulate the process dying at a log boundary.
struct SimulatedCrash {
  std::uint64_t sequence;
};

/// Append-only event log at `<dir>/events.log`.
///
/// One record per line: `<length> <crc32-hex> <json>\n`, where length is the
/// byte length of the JSON document and the CRC covers exactly those bytes.
/// Sequences start at 0 and are dense, so a record's line index is its
/// sequence. The directory is locked for the lifetime of the object.
class EventLog {
 public:
  struct Options {
    bool fsync = true;
    std::optional<std::uintmax_t> capacity_bytes;
  };

  /// Opens (creating if needed) the log in `dir`. A trailing record without
  /// its newline is an unacknowledged torn write and is dropped.
  /// Throws WorkspaceBusy if another EventLog holds the directory.
  static EventLog open(const std::filesystem::path& dir, Options options);
  static EventLog open(const std::filesystem::path& dir) { return open(dir, Options{}); }

  EventLog(EventLog&& other) noexcept;
  EventLog& operator=(EventLog&& other) noexcept;
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;
  ~EventLog();

  /// Durable once this returns. Errors: RedactionViolation, StorageFull.
  std::uint64_t append(Instant occurred_at, events::Payload payload);

  /// Events with sequence >= `from_sequence`, in order. Throws
  /// CorruptRecord naming the first bad sequence.
  std::vector<LogEvent> load(std::uint64_t from_sequence) const;

  std::uint64_t next_sequence() const noexcept { return next_sequence_; }
  const std::filesystem::path& directory() const noexcept { return dir_; }
  std::filesystem::path file() const { return dir_ / "events.log"; }

  /// Called with the sequence about to be written, before anything touches
  /// the file. Used for crash injection.
  void set_before_append_hook(std::function<void(std::uint64_t)> hook) { before_append_ = std::move(hook); }

  /// Encodes one record line (including the trailing newline).
  static std::string encode_record(const LogEvent& event);

 private:
  EventLog(std::filesystem::path dir, Options options, int fd, int lock_fd);

  std::filesystem::path dir_;
  Options options_;
  int fd_ = -1;
  int lock_fd_ = -1;
  std::uint64_t next_sequence_ = 0;
  std::uintmax_t size_ = 0;
  std::function<void(std::uint64_t)> before_append_;
};

/// Derived state snapshots at `<dir>/snapshots/<seq>.snap`, framed like log
/// records. `seq` is the last sequence folded into the snapshot. Snapshots are
/// disposable: a missing or corrupt one just means folding more of the log.
class SnapshotStore {
 public:
  explicit SnapshotStore(std::filesystem::path dir) : dir_(std::move(dir) / "snapshots") {}

  void write(std::uint64_t sequence, const nlohmann::json& state) const;
  /// Newest intact snapshot, if any.
  std::optional<std::pair<std::uint64_t, nlohmann::json>> latest() const;
  void clear() const;

 private:
  std::filesystem::path dir_;
};

inline constexpr std::uint64_t kSnapshotInterval = 1000;

}  // namespace nooks
