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

#include "skystream/sim/airports.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace skystream::sim {
namespace detail {
extern const std::string_view kEmbeddedAirportsCsv;
}  // namespace detail

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_coordinate(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw AirportTableError("airport table line " + std::to_string(line_no) +
                            ": bad coordinate '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<Airport> parse_airport_table(std::string_view csv) {
  std::vector<Airport> airports;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  bool header = true;
  while (!csv.empty()) {
    auto nl = csv.find('\n');
    auto line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto cols = split(line, ',');
    if (cols.size() != 4) {
      throw AirportTableError("airport table line " + std::to_string(line_no) +
                              ": expected 4 columns");
    }
    Airport a;
    a.icao = std::string(cols[0]);
    a.location = {parse_coordinate(cols[1], line_no), parse_coordinate(cols[2], line_no)};
    a.location.lng = normalize_longitude(a.location.lng);
    a.state = std::string(cols[3]);
    if (a.icao.size() != 4) {
      throw AirportTableError("airport table line " + std::to_string(line_no) + ": icao must be 4 chars");
    }
    if (a.state.size() != 2) {
      throw AirportTableError("airport table line " + std::to_string(line_no) + ": state must be 2 chars");
    }
    if (!is_valid_point(a.location)) {
      throw AirportTableError("airport table line " + std::to_string(line_no) + ": coordinate out of range");
    }
    if (!seen.insert(a.icao).second) {
      throw AirportTableError("duplicate airport " + a.icao);
    }
    airports.push_back(std::move(a));
  }
  return airports;
}

std::vector<Airport> load_airport_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AirportTableError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_airport_table(buf.str());
}

const std::vector<Airport>& embedded_airports() {
  static const std::vector<Airport> table = parse_airport_table(detail::kEmbeddedAirportsCsv);
  return table;
}

}  // namespace skystream::sim
