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

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace skystream {

/// Integer UTC epoch seconds. Every module compares time through this type.
struct EventTime {
  std::int64_t seconds{0};

  constexpr auto operator<=>(const EventTime&) const = default;
};

struct GeoPoint {
  double lat{0.0};
  double lng{0.0};

  constexpr bool operator==(const GeoPoint&) const = default;
};

enum class FlightStatus { kScheduled, kEnRoute, kLanded };

std::string_view to_string(FlightStatus status);
std::optional<FlightStatus> parse_flight_status(std::string_view text);

struct FlightPosition {
  std::optional<std::string> reg_number;
  std::string flight_icao;
  std::optional<std::string> flight_iata;
  std::string airline_icao;
  std::string dep_icao;
  std::string arr_icao;
  GeoPoint location;
  double alt{0.0};    // meters
  double dir{0.0};    // degrees, [0, 360)
  double speed{0.0};  // km/h
  FlightStatus status{FlightStatus::kScheduled};
  EventTime updated;

  bool operator==(const FlightPosition&) const = default;
};

enum class ValidationErrc { kMissingKeyField, kOutOfRange, kMalformedField };

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ValidationErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ValidationErrc code() const noexcept { return code_; }

 private:
  ValidationErrc code_;
};

/// Longitude in (-180, 180], with -180 folded onto +180.
double normalize_longitude(double lng);
/// Heading in [0, 360).
double normalize_heading(double degrees);

/// Checks the coordinate range rules shared by positions and bare points.
bool is_valid_point(const GeoPoint& p);

/// Parses one field map (an API entry or a log value) into a normalized
/// position. Throws ValidationError; callers dead-letter on failure.
FlightPosition validate_position(const nlohmann::json& raw);

/// Re-validates an in-memory position. Idempotent on valid input.
FlightPosition validate_position(const FlightPosition& position);

/// Wire form used for log values; absent optionals are omitted.
nlohmann::json to_json(const FlightPosition& position);

}  // namespace skystream
