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

#include "skystream/stream/actions.hpp"

#include <unordered_map>

namespace skystream::stream {

std::string position_doc_id(const FlightPosition& position) {
  return position.flight_icao + ":" + std::to_string(position.updated.seconds);
}

std::string window_doc_id(const WindowSnapshot& snapshot) {
  return "win:" + std::to_string(snapshot.window_start.seconds);
}

index::Document position_document(const FlightPosition& p) {
  index::Document doc{
      {"doc_type", std::string("position")},
      {"flight_icao", p.flight_icao},
      {"airline_icao", p.airline_icao},
      {"dep_icao", p.dep_icao},
      {"arr_icao", p.arr_icao},
      {"status", std::string(to_string(p.status))},
      {"location", p.location},
      {"alt", p.alt},
      {"dir", p.dir},
      {"speed", p.speed},
      {"updated", p.updated},
  };
  if (p.reg_number) doc.emplace("reg_number", *p.reg_number);
  if (p.flight_iata) doc.emplace("flight_iata", *p.flight_iata);
  return doc;
}

index::Document window_document(const WindowSnapshot& s) {
  index::Document doc{
      {"doc_type", std::string("window")},
      {"window_start", s.window_start},
      {"window_end", s.window_end},
      {"flight_count", static_cast<double>(s.flight_count)},
      {"distinct_flights", static_cast<double>(s.distinct_flights)},
      {"avg_speed", s.avg_speed},
      {"max_alt", s.max_alt},
  };
  for (const auto& [k, v] : s.status_counts) doc.emplace("status." + k, static_cast<double>(v));
  for (const auto& [k, v] : s.airline_counts) doc.emplace("airline." + k, static_cast<double>(v));
  for (const auto& [k, v] : s.geo_cell_counts) doc.emplace("cell." + k, static_cast<double>(v));
  return doc;
}

namespace {

template <typename T>
const T& require(const index::Document& doc, const char* name) {
  auto it = doc.find(name);
  const T* v = it == doc.end() ? nullptr : std::get_if<T>(&it->second);
  if (!v) throw ValidationError(ValidationErrc::kMalformedField, std::string("document lacks field ") + name);
  return *v;
}

std::optional<std::string> optional_string(const index::Document& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

}  // namespace

FlightPosition position_from_document(const index::Document& doc) {
  FlightPosition p;
  p.flight_icao = require<std::string>(doc, "flight_icao");
  p.airline_icao = require<std::string>(doc, "airline_icao");
  p.dep_icao = require<std::string>(doc, "dep_icao");
  p.arr_icao = require<std::string>(doc, "arr_icao");
  const auto status = parse_flight_status(require<std::string>(doc, "status"));
  if (!status) throw ValidationError(ValidationErrc::kMalformedField, "document has an unknown status");
  p.status = *status;
  p.location = require<GeoPoint>(doc, "location");
  p.alt = require<double>(doc, "alt");
  p.dir = require<double>(doc, "dir");
  p.speed = require<double>(doc, "speed");
  p.updated = require<EventTime>(doc, "updated");
  p.reg_number = optional_string(doc, "reg_number");
  p.flight_iata = optional_string(doc, "flight_iata");
  return p;
}

std::vector<IndexAction> to_index_actions(const MicroBatch& batch, std::span<const WindowSnapshot> closed,
                                          const IndexNames& names) {
  std::vector<IndexAction> actions;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& r : batch.records) {
    auto id = position_doc_id(r.position);
    auto it = slot.find(id);
    if (it != slot.end()) {
      actions[it->second].fields = position_document(r.position);
      continue;
    }
    slot.emplace(id, actions.size());
    actions.push_back({names.positions, std::move(id), position_document(r.position)});
  }
  for (const auto& s : closed) actions.push_back({names.windows, window_doc_id(s), window_document(s)});
  return actions;
}

}  // namespace skystream::stream
