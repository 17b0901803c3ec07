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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skystream/log/frame.hpp"

namespace skystream::log {

enum class LogErrc {
  kTopicExists,
  kInvalidConfig,
  kUnknownTopic,
  kUnknownPartition,
  kRecordTooLarge,
  kEmptyValue,
  kOffsetOutOfRange,
  kCorruptRecord,
  kRegressingCommit,
  kIo,
};

std::string_view to_string(LogErrc code);

class LogError : public std::runtime_error {
 public:
  LogError(LogErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  LogErrc code() const noexcept { return code_; }

 private:
  LogErrc code_;
};

struct RetentionPolicy {
  std::optional<std::int64_t> max_age_seconds;            // nullopt = unlimited
  std::optional<std::uint64_t> max_bytes_per_partition;   // nullopt = unlimited
};

struct TopicConfig {
  std::string name;
  int partitions{4};
  /// Recorded for configuration parity; a single-node log keeps one copy.
  int replication_factor{1};
  RetentionPolicy retention;
  std::uint64_t segment_max_bytes{64ull << 20};

  /// Throws LogError(kInvalidConfig).
  void validate() const;
};

/// When buffered frames are handed to the operating system. Records become
/// readable (count toward the high-watermark) once flushed.
struct FlushPolicy {
  enum class Mode { kEveryRecord, kEveryN, kInterval };
  Mode mode{Mode::kEveryRecord};
  std::uint32_t every_n{1};
  std::chrono::milliseconds interval{100};
  /// Additionally fdatasync on every flush.
  bool sync{false};
};

struct RecordCoordinates {
  int partition{0};
  std::int64_t offset{0};

  bool operator==(const RecordCoordinates&) const = default;
};

/// Metadata of one segment file, exposed for retention auditing.
struct SegmentInfo {
  std::int64_t base_offset{0};
  std::int64_t record_count{0};
  std::uint64_t size_bytes{0};
  std::optional<EventTime> max_timestamp;
  bool active{false};
};

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);

/// Keyed records go to fnv1a64(key) mod partitions.
int partition_for_key(std::string_view key, int partitions);

class Partition;

class Topic {
 public:
  Topic(std::filesystem::path dir, TopicConfig config, FlushPolicy flush);
  ~Topic();
  Topic(const Topic&) = delete;
  Topic& operator=(const Topic&) = delete;

  const TopicConfig& config() const { return config_; }
  int partition_count() const { return config_.partitions; }

  RecordCoordinates append(int partition, std::optional<std::string_view> key,
                           std::string_view value, EventTime timestamp);

  /// Records in [from, min(high_watermark, from + max_records)), CRC-verified.
  std::vector<LogRecord> fetch(int partition, std::int64_t from, std::size_t max_records) const;

  std::int64_t high_watermark(int partition) const;
  /// Oldest readable offset; retention raises it.
  std::int64_t log_start_offset(int partition) const;
  std::vector<SegmentInfo> segments(int partition) const;

  /// Deletes sealed segments that violate the retention policy, oldest first.
  std::int64_t enforce_retention(EventTime now);

  /// Re-scans segment files, truncating at the first torn or corrupt frame.
  std::vector<std::int64_t> recover();

  void flush();

 private:
  Partition& partition(int index) const;

  std::filesystem::path dir_;
  TopicConfig config_;
  FlushPolicy flush_;
  std::vector<std::unique_ptr<Partition>> partitions_;
};

/// Embedded partitioned commit log rooted at one data directory.
///
/// Layout:
///   <data_dir>/<topic>/topic.json
///   <data_dir>/<topic>/<partition>/<base_offset>.seg
///   <data_dir>/_groups/<group_id>.offsets
///
/// Opening a log recovers every existing topic. Handles are thread-safe;
/// appends to one partition are serialized, fetches run alongside them.
class CommitLog {
 public:
  explicit CommitLog(std::filesystem::path data_dir, FlushPolicy flush = {});
  ~CommitLog();
  CommitLog(const CommitLog&) = delete;
  CommitLog& operator=(const CommitLog&) = delete;

  const std::filesystem::path& data_dir() const { return data_dir_; }

  Topic& create_topic(const TopicConfig& config);
  Topic& topic(std::string_view name) const;
  bool has_topic(std::string_view name) const;
  std::vector<std::string> topic_names() const;

  std::vector<LogRecord> fetch(std::string_view topic, int partition, std::int64_t from,
                               std::size_t max_records) const;

  std::int64_t enforce_retention(std::string_view topic, EventTime now);
  std::int64_t enforce_retention(std::string_view topic);
  std::vector<std::int64_t> recover(std::string_view topic);

  /// Persists the next offset to read for (group, topic, partition).
  void commit(std::string_view group, std::string_view topic, int partition, std::int64_t offset);
  /// Last durable commit, or 0 for a group that never committed.
  std::int64_t committed(std::string_view group, std::string_view topic, int partition) const;

  void flush();

 private:
  struct GroupState {
    std::mutex mu;
    std::map<std::pair<std::string, int>, std::int64_t> offsets;
  };

  GroupState& group_state(std::string_view group) const;
  void load_groups();
  void persist_group(const std::string& group, const GroupState& state) const;

  std::filesystem::path data_dir_;
  FlushPolicy flush_;

  mutable std::shared_mutex topics_mu_;
  std::map<std::string, std::unique_ptr<Topic>, std::less<>> topics_;

  mutable std::mutex groups_mu_;
  mutable std::map<std::string, std::unique_ptr<GroupState>, std::less<>> groups_;
};

/// Producer handle. Absent keys rotate strictly round-robin per handle and
/// topic; keyed records hash to a fixed partition.
class Producer {
 public:
  explicit Producer(CommitLog& log) : log_(&log) {}

  RecordCoordinates produce(std::string_view topic, std::optional<std::string_view> key,
                            std::string_view value, EventTime timestamp);

  /// Partition the next record would go to.
  int assign_partition(std::string_view topic, std::optional<std::string_view> key, int partitions);

 private:
  CommitLog* log_;
  std::unordered_map<std::string, std::uint64_t> round_robin_;
};

}  // namespace skystream::log
