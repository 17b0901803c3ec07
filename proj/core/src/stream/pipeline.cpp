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

#include "skystream/stream/pipeline.hpp"

#include <condition_variable>
#include <map>
#include <mutex>
#include <thread>

namespace skystream::stream {

void IndexStoreSink::apply(std::span<const IndexAction> actions) {
  std::map<std::string, std::shared_ptr<index::Index>> touched;
  for (const auto& a : actions) {
    auto it = touched.find(a.index);
    if (it == touched.end()) {
      it = touched.emplace(a.index, store_.get_or_create({a.index, 0, geo_precision_})).first;
    }
    it->second->upsert(a.doc_id, a.fields);
  }
  for (auto& [_, idx] : touched) idx->refresh();
}

Pipeline::Pipeline(log::CommitLog& log, ActionSink& sink, PipelineOptions options, PipelineMetrics* metrics)
    : log_(log),
      sink_(sink),
      options_(std::move(options)),
      metrics_(metrics),
      consumer_(log, options_.topic, options_.stream),
      aggregator_(options_.stream.window_seconds, options_.stream.allowed_lateness_seconds) {
  if (options_.max_apply_attempts < 1) throw StreamConfigError("max_apply_attempts must be >= 1");
  rebuild();
}

void Pipeline::rebuild() {
  const auto& topic = log_.topic(options_.topic);
  std::vector<std::vector<BatchRecord>> runs;
  for (int p = 0; p < consumer_.partition_count(); ++p) {
    std::vector<BatchRecord> run;
    const auto end = consumer_.position(p);
    auto from = topic.log_start_offset(p);
    while (from < end) {
      const auto want = static_cast<std::size_t>(std::min<std::int64_t>(end - from, 10'000));
      auto frames = topic.fetch(p, from, want);
      if (frames.empty()) break;
      for (auto& f : frames) {
        try {
          run.push_back({p, f.offset, f.timestamp, decode_position(f.value)});
        } catch (const std::exception&) {
          // already dead-lettered when first consumed
        }
      }
      from = frames.back().offset + 1;
    }
    runs.push_back(std::move(run));
  }
  auto records = merge_canonical(std::move(runs));
  rebuilt_records_ = records.size();
  // Windows closed here were applied before the crash or restart.
  aggregator_.update(std::span<const BatchRecord>(records), watermark_);
}

void Pipeline::apply_with_retry(std::span<const IndexAction> actions) {
  auto backoff = options_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      sink_.apply(actions);
      return;
    } catch (const std::exception& e) {
      if (attempt >= options_.max_apply_attempts) {
        throw IndexUnavailable(std::string("index apply failed after ") + std::to_string(attempt) +
                               " attempts: " + e.what());
      }
      if (metrics_) ++metrics_->apply_retries;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

BatchOutcome Pipeline::step(EventTime poll_time, std::optional<EventTime> until) {
  const auto t0 = std::chrono::steady_clock::now();
  auto batch = consumer_.poll_batch(poll_time, until);
  const auto late_before = watermark_.late_dropped;
  auto closed = aggregator_.update(batch, watermark_);
  const auto actions = to_index_actions(batch, closed, options_.indexes);
  if (!actions.empty()) apply_with_retry(actions);
  if (options_.crash_after_apply_batch && *options_.crash_after_apply_batch == batch.batch_id) {
    throw InjectedCrash("injected crash after applying batch " + std::to_string(batch.batch_id));
  }
  consumer_.commit(batch);

  BatchOutcome out;
  out.batch_id = batch.batch_id;
  out.records = batch.records.size();
  out.actions = actions.size();
  out.capped = batch.capped;
  out.latency = std::chrono::steady_clock::now() - t0;
  if (metrics_) {
    metrics_->records_consumed += batch.fetched;
    metrics_->dead_letter += batch.dead_letter;
    metrics_->late_dropped += watermark_.late_dropped - late_before;
    metrics_->windows_closed += closed.size();
    ++metrics_->batches_processed;
    metrics_->last_batch_latency_ms =
        static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(out.latency).count());
  }
  out.closed = std::move(closed);
  return out;
}

void Pipeline::run(std::stop_token stop, const std::function<void(const BatchOutcome&)>& on_batch) {
  std::mutex mu;
  std::condition_variable_any cv;
  const auto interval = std::chrono::seconds(options_.stream.batch_interval_seconds);
  while (!stop.stop_requested()) {
    const auto started = std::chrono::steady_clock::now();
    const auto now = std::chrono::duration_cast<std::chrono::seconds>(
        std::chrono::system_clock::now().time_since_epoch());
    auto outcome = step(EventTime{now.count()});
    if (on_batch) on_batch(outcome);
    if (outcome.capped) continue;
    std::unique_lock lock(mu);
    cv.wait_until(lock, stop, started + interval, [] { return false; });
  }
}

std::vector<WindowSnapshot> Pipeline::finish() {
  auto closed = aggregator_.close_all();
  if (!closed.empty()) {
    MicroBatch none;
    apply_with_retry(to_index_actions(none, closed, options_.indexes));
    if (metrics_) metrics_->windows_closed += closed.size();
  }
  return closed;
}

}  // namespace skystream::stream
