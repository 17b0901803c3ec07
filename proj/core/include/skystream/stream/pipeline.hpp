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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <vector>

#include "skystream/index/index.hpp"
#include "skystream/stream/actions.hpp"
#include "skystream/stream/micro_batch.hpp"
#include "skystream/stream/window.hpp"

namespace skystream::stream {

/// Destination of index actions. apply() must be durable when it returns.
class ActionSink {
 public:
  virtual ~ActionSink() = default;
  virtual void apply(std::span<const IndexAction> actions) = 0;
};

/// Applies actions to an IndexStore, creating indexes on first use, then
/// refreshes each touched index.
class IndexStoreSink : public ActionSink {
 public:
  explicit IndexStoreSink(index::IndexStore& store, int geo_precision = 4)
      : store_(store), geo_precision_(geo_precision) {}
  void apply(std::span<const IndexAction> actions) override;

 private:
  index::IndexStore& store_;
  int geo_precision_;
};

/// Process-wide counters exposed by /api/metrics.
struct PipelineMetrics {
  std::atomic<std::uint64_t> records_produced{0};
  std::atomic<std::uint64_t> records_consumed{0};
  std::atomic<std::uint64_t> dead_letter{0};
  std::atomic<std::uint64_t> late_dropped{0};
  std::atomic<std::uint64_t> batches_processed{0};
  std::atomic<std::uint64_t> windows_closed{0};
  std::atomic<std::uint64_t> apply_retries{0};
  /// Gauge: poll-to-commit time of the most recent batch.
  std::atomic<std::uint64_t> last_batch_latency_ms{0};
};

struct PipelineOptions {
  StreamConfig stream;
  std::string topic{"flight-positions"};
  IndexNames indexes;
  int max_apply_attempts{5};
  std::chrono::milliseconds initial_backoff{20};
  /// Test hook: throw InjectedCrash after applying this batch, before commit.
  std::optional<std::uint64_t> crash_after_apply_batch;
};

class InjectedCrash : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sink kept failing after every retry; offsets were not committed.
class IndexUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BatchOutcome {
  std::uint64_t batch_id{0};
  std::size_t records{0};
  std::size_t actions{0};
  std::vector<WindowSnapshot> closed;
  std::chrono::nanoseconds latency{0};
  bool capped{false};
};

/// poll -> watermark -> windows -> index actions -> apply -> commit.
///
/// Offsets are committed only after the sink accepted the batch; doc ids are
/// idempotent, so a replay after a crash leaves the index unchanged. On
/// construction the window state is rebuilt by replaying the log up to the
/// group's committed offsets, discarding windows closed during the rebuild.
class Pipeline {
 public:
  Pipeline(log::CommitLog& log, ActionSink& sink, PipelineOptions options, PipelineMetrics* metrics = nullptr);

  /// One micro-batch. `until` bounds the log timestamps taken (simulated clock).
  /// After any exception the object is spent; construct a new Pipeline to
  /// resume from the committed offsets.
  BatchOutcome step(EventTime poll_time, std::optional<EventTime> until = std::nullopt);

  /// Polls every batch interval until stopped, immediately while a backlog
  /// remains. The stop token interrupts the wait.
  void run(std::stop_token stop, const std::function<void(const BatchOutcome&)>& on_batch = {});

  /// End of stream: closes and applies every open window.
  std::vector<WindowSnapshot> finish();

  const WatermarkState& watermark() const { return watermark_; }
  const StreamConsumer& consumer() const { return consumer_; }
  std::size_t open_windows() const { return aggregator_.open_windows(); }
  /// Records replayed to rebuild window state at construction.
  std::uint64_t rebuilt_records() const { return rebuilt_records_; }

 private:
  void rebuild();
  void apply_with_retry(std::span<const IndexAction> actions);

  log::CommitLog& log_;
  ActionSink& sink_;
  PipelineOptions options_;
  PipelineMetrics* metrics_;
  StreamConsumer consumer_;
  WindowAggregator aggregator_;
  WatermarkState watermark_;
  std::uint64_t rebuilt_records_{0};
};

}  // namespace skystream::stream
