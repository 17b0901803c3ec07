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

#include "skystream/stream/window.hpp"

#include <algorithm>

#include "skystream/index/geohash.hpp"
#include "skystream/index/query.hpp"

namespace skystream::stream {

void WatermarkState::observe(EventTime event_time, int allowed_lateness_seconds) {
  if (!max_event_time || event_time > *max_event_time) {
    max_event_time = event_time;
    watermark = EventTime{event_time.seconds - allowed_lateness_seconds};
  }
}

WatermarkState advance_watermark(WatermarkState state, const MicroBatch& batch, int allowed_lateness_seconds) {
  for (const auto& r : batch.records) state.observe(r.position.updated, allowed_lateness_seconds);
  return state;
}

EventTime assign_window(EventTime ts, std::int64_t window_seconds) {
  return EventTime{index::bucket_start(ts.seconds, window_seconds)};
}

WindowAggregator::WindowAggregator(std::int64_t window_seconds, int allowed_lateness_seconds)
    : window_seconds_(window_seconds), allowed_lateness_seconds_(allowed_lateness_seconds) {
  if (window_seconds <= 0) throw StreamConfigError("window_seconds must be > 0");
  if (allowed_lateness_seconds < 0) throw StreamConfigError("allowed_lateness_seconds must be >= 0");
}

std::vector<WindowSnapshot> WindowAggregator::update(const MicroBatch& batch, WatermarkState& watermark) {
  return update(std::span<const BatchRecord>(batch.records), watermark);
}

std::vector<WindowSnapshot> WindowAggregator::update(std::span<const BatchRecord> records,
                                                     WatermarkState& watermark) {
  std::vector<WindowSnapshot> closed;
  for (const auto& r : records) {
    const auto& p = r.position;
    if (watermark.is_late(p.updated)) {
      ++watermark.late_dropped;
      continue;
    }
    auto& acc = open_[assign_window(p.updated, window_seconds_).seconds];
    acc.max_alt = acc.count == 0 ? p.alt : std::max(acc.max_alt, p.alt);
    ++acc.count;
    acc.flights.insert(p.flight_icao);
    acc.speed_sum += p.speed;
    ++acc.status[std::string(to_string(p.status))];
    ++acc.airline[p.airline_icao];
    ++acc.cells[index::geohash_encode(p.location, kWindowGeoPrecision)];

    watermark.observe(p.updated, allowed_lateness_seconds_);
    while (!open_.empty() && open_.begin()->first + window_seconds_ <= watermark.watermark->seconds) {
      closed.push_back(snapshot(open_.begin()->first, open_.begin()->second));
      open_.erase(open_.begin());
    }
  }
  return closed;
}

std::vector<WindowSnapshot> WindowAggregator::close_all() {
  std::vector<WindowSnapshot> closed;
  for (const auto& [start, acc] : open_) closed.push_back(snapshot(start, acc));
  open_.clear();
  return closed;
}

WindowSnapshot WindowAggregator::snapshot(std::int64_t start, const Accumulator& acc) const {
  WindowSnapshot s;
  s.window_start = EventTime{start};
  s.window_end = EventTime{start + window_seconds_};
  s.flight_count = acc.count;
  s.distinct_flights = acc.flights.size();
  s.avg_speed = acc.count == 0 ? 0.0 : acc.speed_sum / static_cast<double>(acc.count);
  s.max_alt = acc.max_alt;
  s.status_counts = acc.status;
  s.airline_counts = acc.airline;
  s.geo_cell_counts = acc.cells;
  return s;
}

}  // namespace skystream::stream
