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

#include "skystream/stream/micro_batch.hpp"

#include <exception>
#include <queue>
#include <thread>
#include <tuple>

namespace skystream::stream {

void StreamConfig::validate() const {
  if (batch_interval_seconds <= 0) throw StreamConfigError("batch_interval_seconds must be > 0");
  if (window_seconds <= 0) throw StreamConfigError("window_seconds must be > 0");
  if (window_seconds % batch_interval_seconds != 0) {
    throw StreamConfigError("window_seconds must be a multiple of batch_interval_seconds");
  }
  if (allowed_lateness_seconds < 0) throw StreamConfigError("allowed_lateness_seconds must be >= 0");
  if (group_id.empty()) throw StreamConfigError("group_id must be non-empty");
  if (parallelism < 1) throw StreamConfigError("parallelism must be >= 1");
  if (max_records_per_partition < 1) throw StreamConfigError("max_records_per_partition must be >= 1");
}

FlightPosition decode_position(std::string_view value) {
  return validate_position(nlohmann::json::parse(value));
}

std::string encode_position(const FlightPosition& position) { return to_json(position).dump(); }

std::vector<BatchRecord> merge_canonical(std::vector<std::vector<BatchRecord>> runs) {
  using Head = std::tuple<std::int64_t, int, std::size_t>;  // log time, partition, run
  std::priority_queue<Head, std::vector<Head>, std::greater<>> heads;
  std::vector<std::size_t> pos(runs.size(), 0);
  std::size_t total = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    total += runs[r].size();
    if (!runs[r].empty()) heads.emplace(runs[r][0].log_time.seconds, runs[r][0].partition, r);
  }
  std::vector<BatchRecord> out;
  out.reserve(total);
  while (!heads.empty()) {
    const auto r = std::get<2>(heads.top());
    heads.pop();
    out.push_back(std::move(runs[r][pos[r]++]));
    if (pos[r] < runs[r].size()) heads.emplace(runs[r][pos[r]].log_time.seconds, runs[r][pos[r]].partition, r);
  }
  return out;
}

StreamConsumer::StreamConsumer(log::CommitLog& log, std::string topic, StreamConfig config)
    : log_(log), topic_(std::move(topic)), config_(std::move(config)) {
  config_.validate();
  const auto& t = log_.topic(topic_);
  positions_.resize(static_cast<std::size_t>(t.partition_count()));
  for (int p = 0; p < t.partition_count(); ++p) {
    positions_[static_cast<std::size_t>(p)] =
        std::max(log_.committed(config_.group_id, topic_, p), t.log_start_offset(p));
  }
}

namespace {

struct PartitionRun {
  std::vector<BatchRecord> records;
  std::int64_t next_offset{0};
  std::uint64_t fetched{0};
  std::uint64_t dead_letter{0};
  bool capped{false};
};

PartitionRun drain_partition(const log::Topic& topic, int partition, std::int64_t from, std::size_t cap,
                             std::optional<EventTime> until) {
  PartitionRun run;
  from = std::max(from, topic.log_start_offset(partition));
  run.next_offset = from;
  auto frames = topic.fetch(partition, from, cap);
  bool cut = false;
  for (auto& frame : frames) {
    if (until && frame.timestamp > *until) {
      cut = true;
      break;
    }
    ++run.fetched;
    run.next_offset = frame.offset + 1;
    try {
      run.records.push_back({partition, frame.offset, frame.timestamp, decode_position(frame.value)});
    } catch (const std::exception&) {
      ++run.dead_letter;
    }
  }
  run.capped = !cut && frames.size() == cap;
  return run;
}

}  // namespace

MicroBatch StreamConsumer::poll_batch(EventTime poll_time, std::optional<EventTime> until) {
  const auto& topic = log_.topic(topic_);
  const int partitions = partition_count();
  std::vector<PartitionRun> runs(static_cast<std::size_t>(partitions));

  auto work = [&](int worker, int workers) {
    for (int p = worker; p < partitions; p += workers) {
      runs[static_cast<std::size_t>(p)] = drain_partition(topic, p, positions_[static_cast<std::size_t>(p)],
                                                           config_.max_records_per_partition, until);
    }
  };

  const int workers = std::min(config_.parallelism, std::max(partitions, 1));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> threads;
      for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
          try {
            work(w, workers);
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MicroBatch batch;
  batch.batch_id = next_batch_id_++;
  batch.poll_time = poll_time;
  std::vector<std::vector<BatchRecord>> records;
  records.reserve(runs.size());
  for (int p = 0; p < partitions; ++p) {
    auto& run = runs[static_cast<std::size_t>(p)];
    batch.fetched += run.fetched;
    batch.dead_letter += run.dead_letter;
    batch.capped = batch.capped || run.capped;
    batch.next_offsets[p] = run.next_offset;
    positions_[static_cast<std::size_t>(p)] = run.next_offset;
    records.push_back(std::move(run.records));
  }
  batch.records = merge_canonical(std::move(records));
  return batch;
}

void StreamConsumer::commit(const MicroBatch& batch) {
  for (const auto& [partition, offset] : batch.next_offsets) {
    if (log_.committed(config_.group_id, topic_, partition) != offset) {
      log_.commit(config_.group_id, topic_, partition, offset);
    }
  }
}

bool StreamConsumer::caught_up() const {
  const auto& topic = log_.topic(topic_);
  for (int p = 0; p < partition_count(); ++p) {
    if (positions_[static_cast<std::size_t>(p)] < topic.high_watermark(p)) return false;
  }
  return true;
}

}  // namespace skystream::stream
