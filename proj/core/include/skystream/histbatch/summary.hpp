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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skystream/histbatch/bts.hpp"

namespace skystream::histbatch {

enum class FlightClass { kOnTime, kDelayed, kCancelled };

inline constexpr std::int64_t kDelayThresholdMinutes = 15;

/// Cancelled, else delayed iff dep_delay >= 15, else on time.
FlightClass classify(const BtsRecord& record);

inline constexpr std::array<const char*, 5> kCauses = {"weather", "nas", "security", "carrier", "late_aircraft"};
inline constexpr std::array<const char*, 3> kHeadlineCauses = {"weather", "nas", "security"};
inline constexpr std::array<const char*, 7> kWeekdays = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

using CauseMinutes = std::map<std::string, std::int64_t>;

struct DimensionStats {
  std::uint64_t flights{0};
  std::uint64_t delayed{0};
  CauseMinutes cause_minutes;

  bool operator==(const DimensionStats&) const = default;
};

struct WeekdayStats {
  std::uint64_t flights{0};
  std::uint64_t delayed{0};

  bool operator==(const WeekdayStats&) const = default;
};

struct TreemapNode {
  std::string name;
  std::int64_t weight{0};  // delay-cause minutes
  std::vector<TreemapNode> children;

  bool operator==(const TreemapNode&) const = default;
};

/// Rolled-up delay statistics. Percentages are held in hundredths of a
/// percent over non-cancelled flights, so the pair always sums to 10000.
struct DelaySummary {
  std::uint64_t total_flights{0};
  std::uint64_t on_time_count{0};
  std::uint64_t delayed_count{0};
  std::uint64_t cancelled_count{0};
  std::int64_t on_time_pct_hundredths{0};
  std::int64_t delayed_pct_hundredths{0};
  CauseMinutes cause_minutes;
  CauseMinutes headline_cause_minutes;
  std::map<std::string, DimensionStats> by_state;
  std::map<std::string, DimensionStats> by_carrier;
  std::map<std::string, WeekdayStats> by_weekday;
  std::vector<TreemapNode> treemap;

  double on_time_pct() const { return static_cast<double>(on_time_pct_hundredths) / 100.0; }
  double delayed_pct() const { return static_cast<double>(delayed_pct_hundredths) / 100.0; }

  bool operator==(const DelaySummary&) const = default;
};

/// Throws HistError(kEmptyDataset) on an empty list.
DelaySummary summarize(std::span<const BtsRecord> records);

/// Carrier -> flight (carrier + fl_num) hierarchy weighted by delay-cause
/// minutes. Zero-weight nodes are omitted; siblings are ordered by weight
/// descending, then name.
std::vector<TreemapNode> treemap_data(std::span<const BtsRecord> records);

enum class Dimension { kState, kCarrier, kWeekday };

struct RankMetric {
  enum class Kind { kFlights, kDelayed, kCause };
  Kind kind{Kind::kFlights};
  std::string cause;  // one of kCauses when kind == kCause
};

/// Throws HistError(kUnknownDimension) for an unknown name.
Dimension parse_dimension(std::string_view name);
/// "flights", "delayed" or "cause:<c>".
RankMetric parse_metric(std::string_view name);

/// Descending by metric, ties by key ascending. Throws
/// HistError(kUnknownDimension) for cause metrics on weekdays.
std::vector<std::pair<std::string, std::int64_t>> rank_dimension(const DelaySummary& summary, Dimension dimension,
                                                                 const RankMetric& metric);

/// Canonical JSON: sorted keys, two-space indent, trailing newline.
std::string summary_to_json(const DelaySummary& summary);
/// Throws HistError(kMalformedSummary).
DelaySummary summary_from_json(std::string_view text);
/// Throws HistError(kIo).
void export_summary(const DelaySummary& summary, const std::filesystem::path& path);

}  // namespace skystream::histbatch
