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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skystream/log/commit_log.hpp"
#include "skystream/model/flight_position.hpp"

namespace skystream::stream {

class StreamConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StreamConfig {
  int batch_interval_seconds{5};
  /// Must be a multiple of batch_interval_seconds.
  int window_seconds{60};
  int allowed_lateness_seconds{60};
  std::string group_id{"skystream-pipeline"};
  /// Fetch/deserialize workers; partitions are dealt out round-robin.
  int parallelism{1};
  std::size_t max_records_per_partition{10'000};

  /// Throws StreamConfigError.
  void validate() const;
};

struct BatchRecord {
  int partition{0};
  std::int64_t offset{0};
  /// Append timestamp stored in the log frame.
  EventTime log_time;
  FlightPosition position;

  bool operator==(const BatchRecord&) const = default;
};

/// One poll's worth of records.
///
/// Records are in canonical order: a merge of the per-partition sequences by
/// (log_time, partition), so offsets stay increasing within each partition.
struct MicroBatch {
  std::uint64_t batch_id{0};
  EventTime poll_time;
  std::vector<BatchRecord> records;
  /// Frames read, including those that failed to deserialize.
  std::uint64_t fetched{0};
  std::uint64_t dead_letter{0};
  /// Next offset to read per partition once this batch is committed.
  std::map<int, std::int64_t> next_offsets;
  /// True when some partition stopped at the per-batch cap.
  bool capped{false};
};

/// Consumer-group reader over one topic. Starts from the group's committed
/// offsets; positions advance on poll and become durable on commit.
class StreamConsumer {
 public:
  StreamConsumer(log::CommitLog& log, std::string topic, StreamConfig config);

  /// Drains every partition from the current position, stopping per
  /// partition at the record cap, the high-watermark, or the first record
  /// whose log timestamp is after `until`. Undecodable values are counted as
  /// dead letters and skipped. Propagates LogError.
  MicroBatch poll_batch(EventTime poll_time, std::optional<EventTime> until = std::nullopt);

  void commit(const MicroBatch& batch);

  std::int64_t position(int partition) const { return positions_.at(static_cast<std::size_t>(partition)); }
  /// True when every partition is at its high-watermark.
  bool caught_up() const;

  const std::string& topic() const { return topic_; }
  const StreamConfig& config() const { return config_; }
  int partition_count() const { return static_cast<int>(positions_.size()); }

 private:
  log::CommitLog& log_;
  std::string topic_;
  StreamConfig config_;
  std::vector<std::int64_t> positions_;
  std::uint64_t next_batch_id_{1};
};

/// Merges per-partition record runs into canonical order.
std::vector<BatchRecord> merge_canonical(std::vector<std::vector<BatchRecord>> runs);

/// Parses one log value; throws ValidationError or nlohmann::json::exception.
FlightPosition decode_position(std::string_view value);
std::string encode_position(const FlightPosition& position);

}  // namespace skystream::stream
