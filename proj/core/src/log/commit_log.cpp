/*
 * Copyright (c) 2026 The SkyStream Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "skystream/log/commit_log.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace skystream::log {

namespace fs = std::filesystem;

std::string_view to_string(LogErrc code) {
  switch (code) {
    case LogErrc::kTopicExists: return "TopicExists";
    case LogErrc::kInvalidConfig: return "InvalidConfig";
    case LogErrc::kUnknownTopic: return "UnknownTopic";
    case LogErrc::kUnknownPartition: return "UnknownPartition";
    case LogErrc::kRecordTooLarge: return "RecordTooLarge";
    case LogErrc::kEmptyValue: return "EmptyValue";
    case LogErrc::kOffsetOutOfRange: return "OffsetOutOfRange";
    case LogErrc::kCorruptRecord: return "CorruptRecord";
    case LogErrc::kRegressingCommit: return "RegressingCommit";
    case LogErrc::kIo: return "Io";
  }
  return "Unknown";
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

int partition_for_key(std::string_view key, int partitions) {
  return static_cast<int>(fnv1a64(key) % static_cast<std::uint64_t>(partitions));
}

namespace {

[[noreturn]] void io_error(const std::string& what) {
  throw LogError(LogErrc::kIo, what + ": " + std::strerror(errno));
}

bool valid_name(std::string_view name) {
  return !name.empty() && name != "." && name != ".." &&
         name.find_first_of("/\\") == std::string_view::npos && name.find('\0') == std::string_view::npos;
}

class FileHandle {
 public:
  FileHandle() = default;
  explicit FileHandle(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) io_error("open " + path.string());
  }
  ~FileHandle() {
    if (fd_ >= 0) ::close(fd_);
  }
  FileHandle(FileHandle&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  FileHandle& operator=(FileHandle&& other) noexcept {
    if (this != &other) {
      if (fd_ >= 0) ::close(fd_);
      fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
  }

  void write_all(std::string_view data) const {
    while (!data.empty()) {
      auto n = ::write(fd_, data.data(), data.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        io_error("write");
      }
      data.remove_prefix(static_cast<std::size_t>(n));
    }
  }

  std::string read_at(std::uint64_t offset, std::size_t length) const {
    std::string buf(length, '\0');
    std::size_t done = 0;
    while (done < length) {
      auto n = ::pread(fd_, buf.data() + done, length - done, static_cast<off_t>(offset + done));
      if (n < 0) {
        if (errno == EINTR) continue;
        io_error("pread");
      }
      if (n == 0) break;
      done += static_cast<std::size_t>(n);
    }
    buf.resize(done);
    return buf;
  }

  void sync() const {
    if (::fdatasync(fd_) != 0) io_error("fdatasync");
  }

 private:
  int fd_{-1};
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError(LogErrc::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomically(const fs::path& path, std::string_view contents) {
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) io_error("open " + tmp.string());
    std::string_view rest = contents;
    while (!rest.empty()) {
      auto n = ::write(fd, rest.data(), rest.size());
      if (n < 0) {
        if (errno == EINTR) continue;
        ::close(fd);
        io_error("write " + tmp.string());
      }
      rest.remove_prefix(static_cast<std::size_t>(n));
    }
    if (::fsync(fd) != 0) {
      ::close(fd);
      io_error("fsync " + tmp.string());
    }
    ::close(fd);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw LogError(LogErrc::kIo, "rename " + tmp.string() + ": " + ec.message());
}

std::optional<std::int64_t> parse_base_offset(const fs::path& file) {
  if (file.extension() != ".seg") return std::nullopt;
  const auto stem = file.stem().string();
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), value);
  if (ec != std::errc{} || ptr != stem.data() + stem.size() || value < 0) return std::nullopt;
  return value;
}

}  // namespace

void TopicConfig::validate() const {
  if (!valid_name(name) || name == "_groups") {
    throw LogError(LogErrc::kInvalidConfig, "invalid topic name '" + name + "'");
  }
  if (partitions < 1) throw LogError(LogErrc::kInvalidConfig, "partitions must be >= 1");
  if (replication_factor < 1) throw LogError(LogErrc::kInvalidConfig, "replication_factor must be >= 1");
  if (segment_max_bytes == 0) throw LogError(LogErrc::kInvalidConfig, "segment_max_bytes must be > 0");
  if (retention.max_age_seconds && *retention.max_age_seconds < 0) {
    throw LogError(LogErrc::kInvalidConfig, "max_age_seconds must be >= 0");
  }
}

// ---------------------------------------------------------------------------
// Partition

struct Segment {
  std::int64_t base_offset{0};
  fs::path path;
  FileHandle file;
  std::uint64_t size_bytes{0};     // including buffered frames
  std::uint64_t flushed_bytes{0};
  std::vector<std::uint64_t> positions;
  std::optional<EventTime> max_timestamp;

  std::int64_t record_count() const { return static_cast<std::int64_t>(positions.size()); }
};

class Partition {
 public:
  Partition(int index, fs::path dir, std::uint64_t segment_max_bytes, FlushPolicy flush)
      : index_(index), dir_(std::move(dir)), segment_max_bytes_(segment_max_bytes), flush_(flush) {
    fs::create_directories(dir_);
    recover();
  }

  ~Partition() {
    try {
      std::lock_guard lock(mu_);
      flush_locked();
    } catch (...) {
    }
  }

  RecordCoordinates append(std::optional<std::string_view> key, std::string_view value, EventTime ts) {
    const auto size = frame_size(key, value);
    std::lock_guard lock(mu_);
    auto* active = segs_.back().get();
    if (active->record_count() > 0 && active->size_bytes + size > segment_max_bytes_) {
      flush_locked();
      roll_locked();
      active = segs_.back().get();
    }
    const auto offset = next_offset_++;
    active->positions.push_back(active->size_bytes);
    encode_frame(pending_, offset, ts, key, value);
    active->size_bytes += size;
    if (!active->max_timestamp || *active->max_timestamp < ts) active->max_timestamp = ts;
    ++pending_count_;

    bool due = false;
    switch (flush_.mode) {
      case FlushPolicy::Mode::kEveryRecord:
        due = true;
        break;
      case FlushPolicy::Mode::kEveryN:
        due = pending_count_ >= std::max<std::uint32_t>(1, flush_.every_n);
        break;
      case FlushPolicy::Mode::kInterval:
        due = std::chrono::steady_clock::now() - last_flush_ >= flush_.interval;
        break;
    }
    if (due) flush_locked();
    return {index_, offset};
  }

  std::vector<LogRecord> fetch(std::int64_t from, std::size_t max_records) const {
    struct Read {
      std::shared_ptr<Segment> segment;
      std::uint64_t begin;
      std::uint64_t end;
      std::int64_t first_offset;
      std::int64_t count;
    };
    std::vector<Read> reads;
    {
      std::lock_guard lock(mu_);
      maybe_flush_on_interval();
      const auto floor = segs_.front()->base_offset;
      if (from < floor) {
        throw LogError(LogErrc::kOffsetOutOfRange, "offset " + std::to_string(from) +
                                                       " is below the log start offset " +
                                                       std::to_string(floor));
      }
      const auto limit = static_cast<std::int64_t>(std::min<std::uint64_t>(
          max_records, static_cast<std::uint64_t>(INT64_MAX - from)));
      const auto end = std::min(high_watermark_, from + limit);
      for (const auto& seg : segs_) {
        const auto seg_end = seg->base_offset + seg->record_count();
        if (seg_end <= from || seg->base_offset >= end) continue;
        const auto lo = std::max(from, seg->base_offset) - seg->base_offset;
        const auto hi = std::min(end, seg_end) - seg->base_offset;
        const auto byte_end = hi < seg->record_count() ? seg->positions[static_cast<std::size_t>(hi)]
                                                       : seg->flushed_bytes;
        reads.push_back({seg, seg->positions[static_cast<std::size_t>(lo)], byte_end,
                         seg->base_offset + lo, hi - lo});
      }
    }

    std::vector<LogRecord> out;
    for (const auto& r : reads) {
      const auto bytes = r.segment->file.read_at(r.begin, r.end - r.begin);
      std::string_view rest(bytes);
      for (std::int64_t i = 0; i < r.count; ++i) {
        auto decoded = decode_frame(rest);
        if (decoded.status != DecodeStatus::kOk || decoded.record.offset != r.first_offset + i) {
          throw LogError(LogErrc::kCorruptRecord,
                         "corrupt record at offset " + std::to_string(r.first_offset + i) +
                             " in " + r.segment->path.string());
        }
        rest.remove_prefix(decoded.bytes);
        out.push_back(std::move(decoded.record));
      }
    }
    return out;
  }

  std::int64_t high_watermark() const {
    std::lock_guard lock(mu_);
    maybe_flush_on_interval();
    return high_watermark_;
  }

  std::int64_t log_start_offset() const {
    std::lock_guard lock(mu_);
    return segs_.front()->base_offset;
  }

  std::vector<SegmentInfo> segments() const {
    std::lock_guard lock(mu_);
    std::vector<SegmentInfo> out;
    for (std::size_t i = 0; i < segs_.size(); ++i) {
      const auto& s = *segs_[i];
      out.push_back({s.base_offset, s.record_count(), s.size_bytes, s.max_timestamp, i + 1 == segs_.size()});
    }
    return out;
  }

  std::int64_t enforce_retention(const RetentionPolicy& policy, EventTime now) {
    std::lock_guard lock(mu_);
    std::uint64_t total = 0;
    for (const auto& s : segs_) total += s->size_bytes;

    std::int64_t purged = 0;
    while (segs_.size() > 1) {
      const auto& oldest = *segs_.front();
      const bool too_old = policy.max_age_seconds && oldest.max_timestamp &&
                           now.seconds - oldest.max_timestamp->seconds > *policy.max_age_seconds;
      const bool too_big = policy.max_bytes_per_partition && total > *policy.max_bytes_per_partition;
      if (!too_old && !too_big) break;
      std::error_code ec;
      fs::remove(oldest.path, ec);
      if (ec) throw LogError(LogErrc::kIo, "remove " + oldest.path.string() + ": " + ec.message());
      total -= oldest.size_bytes;
      purged += oldest.record_count();
      segs_.erase(segs_.begin());
    }
    return purged;
  }

  std::int64_t recover() {
    std::lock_guard lock(mu_);
    flush_locked();
    segs_.clear();
    pending_.clear();
    pending_count_ = 0;

    std::vector<std::pair<std::int64_t, fs::path>> files;
    for (const auto& entry : fs::directory_iterator(dir_)) {
      if (!entry.is_regular_file()) continue;
      if (auto base = parse_base_offset(entry.path())) files.emplace_back(*base, entry.path());
    }
    std::sort(files.begin(), files.end());

    std::int64_t expected = files.empty() ? 0 : files.front().first;
    bool discard_rest = false;
    for (std::size_t i = 0; i < files.size(); ++i) {
      const auto& [base, path] = files[i];
      if (discard_rest || base != expected) {
        // Anything after a torn frame or an offset gap cannot keep offsets dense.
        fs::remove(path);
        discard_rest = true;
        continue;
      }
      const auto bytes = read_file(path);
      auto seg = std::make_shared<Segment>();
      seg->base_offset = base;
      seg->path = path;
      std::uint64_t pos = 0;
      std::string_view rest(bytes);
      while (!rest.empty()) {
        auto decoded = decode_frame(rest);
        if (decoded.status != DecodeStatus::kOk || decoded.record.offset != expected) break;
        seg->positions.push_back(pos);
        if (!seg->max_timestamp || *seg->max_timestamp < decoded.record.timestamp) {
          seg->max_timestamp = decoded.record.timestamp;
        }
        pos += decoded.bytes;
        rest.remove_prefix(decoded.bytes);
        ++expected;
      }
      if (pos != bytes.size()) {
        fs::resize_file(path, pos);
        discard_rest = true;
      }
      const bool last = discard_rest || i + 1 == files.size();
      if (seg->positions.empty() && !last) {
        fs::remove(path);
        continue;
      }
      seg->size_bytes = seg->flushed_bytes = pos;
      seg->file = FileHandle(path);
      segs_.push_back(std::move(seg));
    }
    if (segs_.empty()) {
      segs_.push_back(open_segment(expected));
    }
    next_offset_ = high_watermark_ = expected;
    last_flush_ = std::chrono::steady_clock::now();
    return high_watermark_;
  }

  void flush() {
    std::lock_guard lock(mu_);
    flush_locked();
  }

 private:
  std::shared_ptr<Segment> open_segment(std::int64_t base) const {
    auto seg = std::make_shared<Segment>();
    seg->base_offset = base;
    seg->path = dir_ / (std::to_string(base) + ".seg");
    seg->file = FileHandle(seg->path);
    return seg;
  }

  void roll_locked() { segs_.push_back(open_segment(next_offset_)); }

  void flush_locked() const {
    if (pending_count_ == 0) return;
    auto& active = *segs_.back();
    active.file.write_all(pending_);
    if (flush_.sync) active.file.sync();
    active.flushed_bytes = active.size_bytes;
    high_watermark_ = next_offset_;
    pending_.clear();
    pending_count_ = 0;
    last_flush_ = std::chrono::steady_clock::now();
  }

  void maybe_flush_on_interval() const {
    if (flush_.mode == FlushPolicy::Mode::kInterval && pending_count_ > 0 &&
        std::chrono::steady_clock::now() - last_flush_ >= flush_.interval) {
      flush_locked();
    }
  }

  int index_;
  fs::path dir_;
  std::uint64_t segment_max_bytes_;
  FlushPolicy flush_;

  mutable std::mutex mu_;
  std::vector<std::shared_ptr<Segment>> segs_;
  std::int64_t next_offset_{0};
  // Buffered state is flushed lazily from const readers under the interval policy.
  mutable std::int64_t high_watermark_{0};
  mutable std::string pending_;
  mutable std::uint32_t pending_count_{0};
  mutable std::chrono::steady_clock::time_point last_flush_{};
};

// ---------------------------------------------------------------------------
// Topic

Topic::Topic(fs::path dir, TopicConfig config, FlushPolicy flush)
    : dir_(std::move(dir)), config_(std::move(config)), flush_(flush) {
  config_.validate();
  partitions_.reserve(static_cast<std::size_t>(config_.partitions));
  for (int p = 0; p < config_.partitions; ++p) {
    partitions_.push_back(
        std::make_unique<Partition>(p, dir_ / std::to_string(p), config_.segment_max_bytes, flush_));
  }
}

Topic::~Topic() = default;

Partition& Topic::partition(int index) const {
  if (index < 0 || index >= config_.partitions) {
    throw LogError(LogErrc::kUnknownPartition,
                   "topic " + config_.name + " has no partition " + std::to_string(index));
  }
  return *partitions_[static_cast<std::size_t>(index)];
}

RecordCoordinates Topic::append(int p, std::optional<std::string_view> key, std::string_view value,
                                EventTime timestamp) {
  if (value.empty()) throw LogError(LogErrc::kEmptyValue, "record value must be non-empty");
  if (value.size() > config_.segment_max_bytes) {
    throw LogError(LogErrc::kRecordTooLarge, "record of " + std::to_string(value.size()) +
                                                 " bytes exceeds segment_max_bytes");
  }
  return partition(p).append(key, value, timestamp);
}

std::vector<LogRecord> Topic::fetch(int p, std::int64_t from, std::size_t max_records) const {
  return partition(p).fetch(from, max_records);
}

std::int64_t Topic::high_watermark(int p) const { return partition(p).high_watermark(); }

std::int64_t Topic::log_start_offset(int p) const { return partition(p).log_start_offset(); }

std::vector<SegmentInfo> Topic::segments(int p) const { return partition(p).segments(); }

std::int64_t Topic::enforce_retention(EventTime now) {
  std::int64_t purged = 0;
  for (auto& p : partitions_) purged += p->enforce_retention(config_.retention, now);
  return purged;
}

std::vector<std::int64_t> Topic::recover() {
  std::vector<std::int64_t> hw;
  for (auto& p : partitions_) hw.push_back(p->recover());
  return hw;
}

void Topic::flush() {
  for (auto& p : partitions_) p->flush();
}

// ---------------------------------------------------------------------------
// CommitLog

namespace {

nlohmann::json config_to_json(const TopicConfig& c) {
  nlohmann::json j = {{"name", c.name},
                      {"partitions", c.partitions},
                      {"replication_factor", c.replication_factor},
                      {"segment_max_bytes", c.segment_max_bytes},
                      {"retention", nlohmann::json::object()}};
  if (c.retention.max_age_seconds) j["retention"]["max_age_seconds"] = *c.retention.max_age_seconds;
  if (c.retention.max_bytes_per_partition) {
    j["retention"]["max_bytes_per_partition"] = *c.retention.max_bytes_per_partition;
  }
  return j;
}

TopicConfig config_from_json(const nlohmann::json& j) {
  TopicConfig c;
  c.name = j.at("name").get<std::string>();
  c.partitions = j.at("partitions").get<int>();
  c.replication_factor = j.at("replication_factor").get<int>();
  c.segment_max_bytes = j.at("segment_max_bytes").get<std::uint64_t>();
  const auto& r = j.at("retention");
  if (r.contains("max_age_seconds")) c.retention.max_age_seconds = r["max_age_seconds"].get<std::int64_t>();
  if (r.contains("max_bytes_per_partition")) {
    c.retention.max_bytes_per_partition = r["max_bytes_per_partition"].get<std::uint64_t>();
  }
  return c;
}

}  // namespace

CommitLog::CommitLog(fs::path data_dir, FlushPolicy flush) : data_dir_(std::move(data_dir)), flush_(flush) {
  std::error_code ec;
  fs::create_directories(data_dir_ / "_groups", ec);
  if (ec) throw LogError(LogErrc::kIo, "cannot create " + data_dir_.string() + ": " + ec.message());

  for (const auto& entry : fs::directory_iterator(data_dir_)) {
    if (!entry.is_directory()) continue;
    const auto meta = entry.path() / "topic.json";
    if (!fs::exists(meta)) continue;
    TopicConfig config;
    try {
      config = config_from_json(nlohmann::json::parse(read_file(meta)));
    } catch (const nlohmann::json::exception& e) {
      throw LogError(LogErrc::kIo, "unreadable topic metadata " + meta.string() + ": " + e.what());
    }
    auto name = config.name;
    topics_.emplace(name, std::make_unique<Topic>(entry.path(), std::move(config), flush_));
  }
  load_groups();
}

CommitLog::~CommitLog() = default;

Topic& CommitLog::create_topic(const TopicConfig& config) {
  config.validate();
  std::unique_lock lock(topics_mu_);
  if (topics_.contains(config.name)) {
    throw LogError(LogErrc::kTopicExists, "topic " + config.name + " already exists");
  }
  const auto dir = data_dir_ / config.name;
  fs::create_directories(dir);
  write_file_atomically(dir / "topic.json", config_to_json(config).dump(2) + "\n");
  auto [it, _] = topics_.emplace(config.name, std::make_unique<Topic>(dir, config, flush_));
  return *it->second;
}

Topic& CommitLog::topic(std::string_view name) const {
  std::shared_lock lock(topics_mu_);
  auto it = topics_.find(name);
  if (it == topics_.end()) throw LogError(LogErrc::kUnknownTopic, "unknown topic " + std::string(name));
  return *it->second;
}

bool CommitLog::has_topic(std::string_view name) const {
  std::shared_lock lock(topics_mu_);
  return topics_.find(name) != topics_.end();
}

std::vector<std::string> CommitLog::topic_names() const {
  std::shared_lock lock(topics_mu_);
  std::vector<std::string> names;
  for (const auto& [name, _] : topics_) names.push_back(name);
  return names;
}

std::vector<LogRecord> CommitLog::fetch(std::string_view t, int partition, std::int64_t from,
                                        std::size_t max_records) const {
  return topic(t).fetch(partition, from, max_records);
}

std::int64_t CommitLog::enforce_retention(std::string_view t, EventTime now) {
  return topic(t).enforce_retention(now);
}

std::int64_t CommitLog::enforce_retention(std::string_view t) {
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
      std::chrono::system_clock::now().time_since_epoch());
  return enforce_retention(t, EventTime{now.count()});
}

std::vector<std::int64_t> CommitLog::recover(std::string_view t) { return topic(t).recover(); }

void CommitLog::flush() {
  std::shared_lock lock(topics_mu_);
  for (auto& [_, t] : topics_) t->flush();
}

CommitLog::GroupState& CommitLog::group_state(std::string_view group) const {
  if (!valid_name(group)) {
    throw LogError(LogErrc::kInvalidConfig, "invalid consumer group id '" + std::string(group) + "'");
  }
  std::lock_guard lock(groups_mu_);
  auto it = groups_.find(group);
  if (it == groups_.end()) {
    it = groups_.emplace(std::string(group), std::make_unique<GroupState>()).first;
  }
  return *it->second;
}

void CommitLog::load_groups() {
  for (const auto& entry : fs::directory_iterator(data_dir_ / "_groups")) {
    if (entry.path().extension() != ".offsets") continue;
    auto state = std::make_unique<GroupState>();
    std::istringstream in(read_file(entry.path()));
    std::string line;
    while (std::getline(in, line)) {
      // topic \t partition \t offset; later lines win
      auto t1 = line.find('\t');
      auto t2 = line.find('\t', t1 == std::string::npos ? t1 : t1 + 1);
      if (t1 == std::string::npos || t2 == std::string::npos) continue;
      try {
        const int partition = std::stoi(line.substr(t1 + 1, t2 - t1 - 1));
        const std::int64_t offset = std::stoll(line.substr(t2 + 1));
        state->offsets[{line.substr(0, t1), partition}] = offset;
      } catch (const std::exception&) {
        continue;
      }
    }
    groups_.emplace(entry.path().stem().string(), std::move(state));
  }
}

void CommitLog::persist_group(const std::string& group, const GroupState& state) const {
  std::string body;
  for (const auto& [key, offset] : state.offsets) {
    body += key.first + "\t" + std::to_string(key.second) + "\t" + std::to_string(offset) + "\n";
  }
  write_file_atomically(data_dir_ / "_groups" / (group + ".offsets"), body);
}

void CommitLog::commit(std::string_view group, std::string_view t, int partition, std::int64_t offset) {
  const auto& tp = topic(t);
  const auto hw = tp.high_watermark(partition);
  if (offset < 0 || offset > hw) {
    throw LogError(LogErrc::kOffsetOutOfRange, "commit offset " + std::to_string(offset) +
                                                   " outside [0, " + std::to_string(hw) + "]");
  }
  auto& state = group_state(group);
  std::lock_guard lock(state.mu);
  auto key = std::make_pair(std::string(t), partition);
  auto it = state.offsets.find(key);
  if (it != state.offsets.end() && offset < it->second) {
    throw LogError(LogErrc::kRegressingCommit, "commit " + std::to_string(offset) +
                                                   " is below committed " + std::to_string(it->second));
  }
  const auto previous = it == state.offsets.end() ? std::optional<std::int64_t>{} : it->second;
  state.offsets[key] = offset;
  try {
    persist_group(std::string(group), state);
  } catch (...) {
    if (previous) {
      state.offsets[key] = *previous;
    } else {
      state.offsets.erase(key);
    }
    throw;
  }
}

std::int64_t CommitLog::committed(std::string_view group, std::string_view t, int partition) const {
  auto& state = group_state(group);
  std::lock_guard lock(state.mu);
  auto it = state.offsets.find({std::string(t), partition});
  return it == state.offsets.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Producer

int Producer::assign_partition(std::string_view topic, std::optional<std::string_view> key, int partitions) {
  if (partitions == 1) return 0;
  if (key) return partition_for_key(*key, partitions);
  auto& cursor = round_robin_[std::string(topic)];
  return static_cast<int>(cursor++ % static_cast<std::uint64_t>(partitions));
}

RecordCoordinates Producer::produce(std::string_view topic, std::optional<std::string_view> key,
                                    std::string_view value, EventTime timestamp) {
  auto& t = log_->topic(topic);
  const int p = assign_partition(topic, key, t.partition_count());
  return t.append(p, key, value, timestamp);
}

}  // namespace skystream::log
