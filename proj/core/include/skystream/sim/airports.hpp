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

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skystream/model/flight_position.hpp"

namespace skystream::sim {

struct Airport {
  std::string icao;
  GeoPoint location;
  std::string state;

  bool operator==(const Airport&) const = default;
};

class AirportTableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `icao,lat,lng,state` rows after a header line.
std::vector<Airport> parse_airport_table(std::string_view csv);
std::vector<Airport> load_airport_table(const std::filesystem::path& path);

/// The 30-airport US table compiled in from data/airports.csv.
const std::vector<Airport>& embedded_airports();

}  // namespace skystream::sim
