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

#include "skystream/histbatch/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace skystream::histbatch {

using nlohmann::json;

FlightClass classify(const BtsRecord& r) {
  if (r.cancelled) return FlightClass::kCancelled;
  if (r.dep_delay && *r.dep_delay >= kDelayThresholdMinutes) return FlightClass::kDelayed;
  return FlightClass::kOnTime;
}

namespace {

CauseMinutes zero_causes() {
  CauseMinutes m;
  for (const auto* c : kCauses) m[c] = 0;
  return m;
}

std::array<std::int64_t, 5> causes_of(const BtsRecord& r) {
  return {r.weather_delay.value_or(0), r.nas_delay.value_or(0), r.security_delay.value_or(0),
          r.carrier_delay.value_or(0), r.late_aircraft_delay.value_or(0)};
}

void add(DimensionStats& d, const BtsRecord& r, bool delayed) {
  if (d.cause_minutes.empty()) d.cause_minutes = zero_causes();
  ++d.flights;
  if (delayed) ++d.delayed;
  const auto minutes = causes_of(r);
  for (std::size_t i = 0; i < kCauses.size(); ++i) d.cause_minutes[kCauses[i]] += minutes[i];
}

template <typename Node>
void order_nodes(std::vector<Node>& nodes) {
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.name < b.name;
  });
}

}  // namespace

std::vector<TreemapNode> treemap_data(std::span<const BtsRecord> records) {
  std::map<std::string, std::map<std::string, std::int64_t>> minutes;
  for (const auto& r : records) {
    if (r.cancelled) continue;
    std::int64_t total = 0;
    for (auto m : causes_of(r)) total += m;
    if (total > 0) minutes[r.carrier][r.carrier + r.fl_num] += total;
  }
  std::vector<TreemapNode> out;
  for (auto& [carrier, flights] : minutes) {
    TreemapNode parent{carrier, 0, {}};
    for (auto& [flight, weight] : flights) {
      parent.children.push_back({flight, weight, {}});
      parent.weight += weight;
    }
    order_nodes(parent.children);
    out.push_back(std::move(parent));
  }
  order_nodes(out);
  return out;
}

DelaySummary summarize(std::span<const BtsRecord> records) {
  if (records.empty()) throw HistError(HistErrc::kEmptyDataset, "no records to summarize");
  DelaySummary s;
  s.cause_minutes = zero_causes();
  for (const auto* day : kWeekdays) s.by_weekday[day] = {};

  for (const auto& r : records) {
    ++s.total_flights;
    const auto cls = classify(r);
    if (cls == FlightClass::kCancelled) {
      ++s.cancelled_count;
      continue;
    }
    const bool delayed = cls == FlightClass::kDelayed;
    ++(delayed ? s.delayed_count : s.on_time_count);
    add(s.by_state[r.origin_state], r, delayed);
    add(s.by_carrier[r.carrier], r, delayed);
    auto& wd = s.by_weekday[kWeekdays[static_cast<std::size_t>(r.fl_date.weekday())]];
    ++wd.flights;
    if (delayed) ++wd.delayed;
    const auto minutes = causes_of(r);
    for (std::size_t i = 0; i < kCauses.size(); ++i) s.cause_minutes[kCauses[i]] += minutes[i];
  }
  for (const auto* c : kHeadlineCauses) s.headline_cause_minutes[c] = s.cause_minutes[c];

  const auto base = s.on_time_count + s.delayed_count;
  if (base > 0) {
    // Round half up to hundredths of a percent; delayed takes the remainder.
    s.on_time_pct_hundredths = static_cast<std::int64_t>((s.on_time_count * 20000 + base) / (2 * base));
    s.delayed_pct_hundredths = 10000 - s.on_time_pct_hundredths;
  }
  s.treemap = treemap_data(records);
  return s;
}

Dimension parse_dimension(std::string_view name) {
  if (name == "state") return Dimension::kState;
  if (name == "carrier") return Dimension::kCarrier;
  if (name == "weekday") return Dimension::kWeekday;
  throw HistError(HistErrc::kUnknownDimension, "unknown dimension '" + std::string(name) + "'");
}

RankMetric parse_metric(std::string_view name) {
  if (name == "flights") return {RankMetric::Kind::kFlights, {}};
  if (name == "delayed") return {RankMetric::Kind::kDelayed, {}};
  if (name.starts_with("cause:")) {
    auto cause = std::string(name.substr(6));
    if (std::find_if(kCauses.begin(), kCauses.end(), [&](const char* c) { return cause == c; }) != kCauses.end()) {
      return {RankMetric::Kind::kCause, std::move(cause)};
    }
  }
  throw HistError(HistErrc::kUnknownDimension, "unknown metric '" + std::string(name) + "'");
}

std::vector<std::pair<std::string, std::int64_t>> rank_dimension(const DelaySummary& summary, Dimension dimension,
                                                                 const RankMetric& metric) {
  std::vector<std::pair<std::string, std::int64_t>> out;
  auto value = [&](std::uint64_t flights, std::uint64_t delayed) {
    return static_cast<std::int64_t>(metric.kind == RankMetric::Kind::kFlights ? flights : delayed);
  };
  if (dimension == Dimension::kWeekday) {
    if (metric.kind == RankMetric::Kind::kCause) {
      throw HistError(HistErrc::kUnknownDimension, "weekday rollups carry no cause minutes");
    }
    for (const auto& [k, v] : summary.by_weekday) out.emplace_back(k, value(v.flights, v.delayed));
  } else {
    const auto& dims = dimension == Dimension::kState ? summary.by_state : summary.by_carrier;
    for (const auto& [k, v] : dims) {
      if (metric.kind == RankMetric::Kind::kCause) {
        auto it = v.cause_minutes.find(metric.cause);
        if (it == v.cause_minutes.end()) {
          throw HistError(HistErrc::kUnknownDimension, "unknown cause '" + metric.cause + "'");
        }
        out.emplace_back(k, it->second);
      } else {
        out.emplace_back(k, value(v.flights, v.delayed));
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  return out;
}

namespace {

json dimension_json(const std::map<std::string, DimensionStats>& dims) {
  json out = json::object();
  for (const auto& [k, v] : dims) {
    out[k] = {{"flights", v.flights}, {"delayed", v.delayed}, {"cause_minutes", v.cause_minutes}};
  }
  return out;
}

json treemap_json(const std::vector<TreemapNode>& nodes) {
  json out = json::array();
  for (const auto& n : nodes) {
    json node = {{"name", n.name}, {"weight", n.weight}};
    if (!n.children.empty()) node["children"] = treemap_json(n.children);
    out.push_back(std::move(node));
  }
  return out;
}

std::vector<TreemapNode> treemap_from(const json& j) {
  std::vector<TreemapNode> out;
  for (const auto& n : j) {
    TreemapNode node{n.at("name").get<std::string>(), n.at("weight").get<std::int64_t>(), {}};
    if (n.contains("children")) node.children = treemap_from(n.at("children"));
    out.push_back(std::move(node));
  }
  return out;
}

std::map<std::string, DimensionStats> dimension_from(const json& j) {
  std::map<std::string, DimensionStats> out;
  for (const auto& [k, v] : j.items()) {
    out[k] = {v.at("flights").get<std::uint64_t>(), v.at("delayed").get<std::uint64_t>(),
              v.at("cause_minutes").get<CauseMinutes>()};
  }
  return out;
}

}  // namespace

std::string summary_to_json(const DelaySummary& s) {
  json j;
  j["total_flights"] = s.total_flights;
  j["on_time_count"] = s.on_time_count;
  j["delayed_count"] = s.delayed_count;
  j["cancelled_count"] = s.cancelled_count;
  j["on_time_pct"] = s.on_time_pct();
  j["delayed_pct"] = s.delayed_pct();
  j["cause_minutes"] = s.cause_minutes;
  j["headline_cause_minutes"] = s.headline_cause_minutes;
  j["by_state"] = dimension_json(s.by_state);
  j["by_carrier"] = dimension_json(s.by_carrier);
  json weekdays = json::object();
  for (const auto& [k, v] : s.by_weekday) weekdays[k] = {{"flights", v.flights}, {"delayed", v.delayed}};
  j["by_weekday"] = std::move(weekdays);
  j["treemap"] = treemap_json(s.treemap);
  return j.dump(2) + "\n";
}

DelaySummary summary_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    DelaySummary s;
    s.total_flights = j.at("total_flights").get<std::uint64_t>();
    s.on_time_count = j.at("on_time_count").get<std::uint64_t>();
    s.delayed_count = j.at("delayed_count").get<std::uint64_t>();
    s.cancelled_count = j.at("cancelled_count").get<std::uint64_t>();
    s.on_time_pct_hundredths = std::llround(j.at("on_time_pct").get<double>() * 100.0);
    s.delayed_pct_hundredths = std::llround(j.at("delayed_pct").get<double>() * 100.0);
    s.cause_minutes = j.at("cause_minutes").get<CauseMinutes>();
    s.headline_cause_minutes = j.at("headline_cause_minutes").get<CauseMinutes>();
    s.by_state = dimension_from(j.at("by_state"));
    s.by_carrier = dimension_from(j.at("by_carrier"));
    for (const auto& [k, v] : j.at("by_weekday").items()) {
      s.by_weekday[k] = {v.at("flights").get<std::uint64_t>(), v.at("delayed").get<std::uint64_t>()};
    }
    s.treemap = treemap_from(j.at("treemap"));
    return s;
  } catch (const json::exception& e) {
    throw HistError(HistErrc::kMalformedSummary, std::string("malformed summary: ") + e.what());
  }
}

void export_summary(const DelaySummary& summary, const std::filesystem::path& path) {
  const auto text = summary_to_json(summary);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw HistError(HistErrc::kIo, "cannot write " + path.string());
}

}  // namespace skystream::histbatch
