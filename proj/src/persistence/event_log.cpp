#include "nooks/persistence/event_log.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "nooks/domain/errors.hpp"

namespace nooks {
namespace {

std::uint32_t checksum(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string frame(const std::string& doc) {
  char head[32];
  std::snprintf(head, sizeof head, "%zu %08x ", doc.size(), checksum(doc));
  return head + doc + "\n";
}

/// Parses one framed record starting at `pos`; advances `pos` past it.
/// Returns nullopt if the frame or checksum is bad.
std::optional<std::string> unframe(const std::string& data, std::size_t& pos) {
  const auto sp1 = data.find(' ', pos);
  if (sp1 == std::string::npos || sp1 == pos) return std::nullopt;
  std::size_t length = 0;
  for (std::size_t i = pos; i < sp1; ++i) {
    if (data[i] < '0' || data[i] > '9') return std::nullopt;
    length = length * 10 + static_cast<std::size_t>(data[i] - '0');
  }
  const auto crc_start = sp1 + 1;
  if (crc_start + 9 > data.size() || data[crc_start + 8] != ' ') return std::nullopt;
  std::uint32_t crc = 0;
  for (std::size_t i = crc_start; i < crc_start + 8; ++i) {
    const char c = data[i];
    std::uint32_t v;
    if (c >= '0' && c <= '9') {
      v = static_cast<std::uint32_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<std::uint32_t>(c - 'a' + 10);
    } else {
      return std::nullopt;
    }
    crc = (crc << 4) | v;
  }
  const auto doc_start = crc_start + 9;
  if (doc_start + length + 1 > data.size()) return std::nullopt;
  if (data[doc_start + length] != '\n') return std::nullopt;
  std::string doc = data.substr(doc_start, length);
  if (checksum(doc) != crc) return std::nullopt;
  pos = doc_start + length + 1;
  return doc;
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_fully(int fd, const std::string& bytes) {
  std::size_t written = 0;
  while (written < bytes.size()) {
    const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == ENOSPC || errno == EDQUOT) throw NooksError(ErrorCode::StorageFull, "event log: no space left");
      throw NooksError(ErrorCode::StorageFull, std::string("event log write failed: ") + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

}  // namespace

EventLog::EventLog(std::filesystem::path dir, Options options, int fd, int lock_fd)
    : dir_(std::move(dir)), options_(options), fd_(fd), lock_fd_(lock_fd) {}

EventLog::EventLog(EventLog&& other) noexcept
    : dir_(std::move(other.dir_)),
      options_(other.options_),
      fd_(std::exchange(other.fd_, -1)),
      lock_fd_(std::exchange(other.lock_fd_, -1)),
      next_sequence_(other.next_sequence_),
      size_(other.size_),
      before_append_(std::move(other.before_append_)) {}

EventLog& EventLog::operator=(EventLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    if (lock_fd_ >= 0) ::close(lock_fd_);
    dir_ = std::move(other.dir_);
    options_ = other.options_;
    fd_ = std::exchange(other.fd_, -1);
    lock_fd_ = std::exchange(other.lock_fd_, -1);
    next_sequence_ = other.next_sequence_;
    size_ = other.size_;
    before_append_ = std::move(other.before_append_);
  }
  return *this;
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

EventLog EventLog::open(const std::filesystem::path& dir, Options options) {
  std::filesystem::create_directories(dir);
  const int lock_fd = ::open((dir / "LOCK").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
  if (lock_fd < 0) throw NooksError(ErrorCode::InvalidConfig, "cannot open lock file in " + dir.string());
  if (::flock(lock_fd, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd);
    throw NooksError(ErrorCode::WorkspaceBusy, "workspace is in use by another process: " + dir.string());
  }

  const auto path = dir / "events.log";
  std::string data = std::filesystem::exists(path) ? read_all(path) : std::string();
  // Drop an unterminated tail: it was never acknowledged.
  const auto last_newline = data.rfind('\n');
  const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (keep != data.size()) {
    std::filesystem::resize_file(path, keep);
    data.resize(keep);
  }

  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
  if (fd < 0) {
    ::close(lock_fd);
    throw NooksError(ErrorCode::InvalidConfig, "cannot open " + path.string());
  }
  EventLog log(dir, options, fd, lock_fd);
  log.size_ = data.size();
  log.next_sequence_ = static_cast<std::uint64_t>(std::count(data.begin(), data.end(), '\n'));
  return log;
}

std::string EventLog::encode_record(const LogEvent& event) {
  return frame(to_json(event).dump());
}

std::uint64_t EventLog::append(Instant occurred_at, events::Payload payload) {
  LogEvent event{next_sequence_, occurred_at, std::move(payload)};
  const auto doc = to_json(event);
  if (contains_message_body_field(doc.at("data"))) {
    throw NooksError(ErrorCode::RedactionViolation, "payload carries a message-body field");
  }
  const std::string record = frame(doc.dump());
  if (options_.capacity_bytes && size_ + record.size() > *options_.capacity_bytes) {
    throw NooksError(ErrorCode::StorageFull, "event log capacity exhausted");
  }
  if (before_append_) before_append_(event.sequence);
  write_fully(fd_, record);
  if (options_.fsync && ::fsync(fd_) != 0) {
    throw NooksError(ErrorCode::StorageFull, std::string("fsync failed: ") + std::strerror(errno));
  }
  size_ += record.size();
  return next_sequence_++;
}

std::vector<LogEvent> EventLog::load(std::uint64_t from_sequence) const {
  const std::string data = read_all(file());
  std::vector<LogEvent> out;
  std::size_t pos = 0;
  std::uint64_t seq = 0;
  while (pos < data.size()) {
    const std::size_t line_end = data.find('\n', pos);
    if (seq < from_sequence && line_end != std::string::npos) {
      // Records before the requested range are skipped without verification.
      pos = line_end + 1;
      ++seq;
      continue;
    }
    auto doc = unframe(data, pos);
    if (!doc) {
      throw CorruptRecordError(seq, "checksum mismatch");
    }
    LogEvent event;
    try {
      event = log_event_from_json(nlohmann::json::parse(*doc));
    } catch (const std::exception&) {
      throw CorruptRecordError(seq, "unparseable document");
    }
    if (event.sequence != seq) {
      throw CorruptRecordError(seq, "sequence mismatch");
    }
    out.push_back(std::move(event));
    ++seq;
  }
  return out;
}

void SnapshotStore::write(std::uint64_t sequence, const nlohmann::json& state) const {
  std::filesystem::create_directories(dir_);
  const auto path = dir_ / (std::to_string(sequence) + ".snap");
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << frame(state.dump());
    if (!out) throw NooksError(ErrorCode::StorageFull, "cannot write snapshot " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::pair<std::uint64_t, nlohmann::json>> SnapshotStore::latest() const {
  if (!std::filesystem::exists(dir_)) return std::nullopt;
  std::vector<std::uint64_t> seqs;
  for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
    if (entry.path().extension() != ".snap") continue;
    try {
      seqs.push_back(std::stoull(entry.path().stem().string()));
    } catch (const std::exception&) {
    }
  }
  std::sort(seqs.rbegin(), seqs.rend());
  for (auto seq : seqs) {
    const std::string data = read_all(dir_ / (std::to_string(seq) + ".snap"));
    std::size_t pos = 0;
    auto doc = unframe(data, pos);
    if (!doc) continue;
    try {
      return std::make_pair(seq, nlohmann::json::parse(*doc));
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

void SnapshotStore::clear() const { std::filesystem::remove_all(dir_); }

}  // namespace nooks
