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
#include <string>
#include <vector>

#include "skystream/stream/micro_batch.hpp"

namespace skystream::stream {

inline constexpr int kWindowGeoPrecision = 4;

/// Event-time progress. The watermark is absent until the first event.
struct WatermarkState {
  std::optional<EventTime> max_event_time;
  std::optional<EventTime> watermark;
  std::uint64_t late_dropped{0};

  void observe(EventTime event_time, int allowed_lateness_seconds);
  bool is_late(EventTime event_time) const { return watermark && event_time < *watermark; }

  bool operator==(const WatermarkState&) const = default;
};

/// Folds a whole batch into the watermark. Equivalent to observing every
/// record in turn; an empty batch leaves the state unchanged.
WatermarkState advance_watermark(WatermarkState state, const MicroBatch& batch, int allowed_lateness_seconds);

/// floor(ts / window) * window; a boundary belongs to the later window.
EventTime assign_window(EventTime ts, std::int64_t window_seconds);

struct WindowSnapshot {
  EventTime window_start;
  EventTime window_end;
  std::uint64_t flight_count{0};
  std::uint64_t distinct_flights{0};
  double avg_speed{0.0};  // km/h
  double max_alt{0.0};    // meters
  std::map<std::string, std::uint64_t> status_counts;
  std::map<std::string, std::uint64_t> airline_counts;
  std::map<std::string, std::uint64_t> geo_cell_counts;

  bool operator==(const WindowSnapshot&) const = default;
};

/// Tumbling-window state. Records are applied one at a time in batch order:
/// a record older than the current watermark is dropped as late, otherwise
/// it is added to its window and then advances the watermark, and every
/// window with window_end <= watermark closes. Because the watermark moves
/// per record, the closed sequence does not depend on where batches split.
class WindowAggregator {
 public:
  explicit WindowAggregator(std::int64_t window_seconds, int allowed_lateness_seconds);

  /// Returns the windows closed by this batch, in window order.
  std::vector<WindowSnapshot> update(const MicroBatch& batch, WatermarkState& watermark);
  std::vector<WindowSnapshot> update(std::span<const BatchRecord> records, WatermarkState& watermark);

  /// Closes every open window (end of stream).
  std::vector<WindowSnapshot> close_all();

  std::size_t open_windows() const { return open_.size(); }
  std::int64_t window_seconds() const { return window_seconds_; }

 private:
  struct Accumulator {
    std::uint64_t count{0};
    std::set<std::string> flights;
    double speed_sum{0.0};
    double max_alt{0.0};
    std::map<std::string, std::uint64_t> status;
    std::map<std::string, std::uint64_t> airline;
    std::map<std::string, std::uint64_t> cells;
  };

  WindowSnapshot snapshot(std::int64_t start, const Accumulator& acc) const;

  std::int64_t window_seconds_;
  int allowed_lateness_seconds_;
  std::map<std::int64_t, Accumulator> open_;
};

}  // namespace skystream::stream
