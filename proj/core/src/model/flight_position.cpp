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

#include "skystream/model/flight_position.hpp"

#include <cmath>

namespace skystream {

std::string_view to_string(FlightStatus status) {
  switch (status) {
    case FlightStatus::kScheduled:
      return "scheduled";
    case FlightStatus::kEnRoute:
      return "en-route";
    case FlightStatus::kLanded:
      return "landed";
  }
  return "scheduled";
}

std::optional<FlightStatus> parse_flight_status(std::string_view text) {
  if (text == "scheduled") return FlightStatus::kScheduled;
  if (text == "en-route") return FlightStatus::kEnRoute;
  if (text == "landed") return FlightStatus::kLanded;
  return std::nullopt;
}

double normalize_longitude(double lng) {
  return lng == -180.0 ? 180.0 : lng;
}

double normalize_heading(double degrees) {
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) d += 360.0;
  // fmod of a tiny negative value can round back up to exactly 360
  if (d >= 360.0) d = 0.0;
  return d;
}

bool is_valid_point(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lng) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lng > -180.0 && p.lng <= 180.0;
}

namespace {

[[noreturn]] void fail(ValidationErrc code, const std::string& what) {
  throw ValidationError(code, what);
}

std::string required_string(const nlohmann::json& raw, const char* key) {
  auto it = raw.find(key);
  if (it == raw.end() || it->is_null()) {
    fail(ValidationErrc::kMalformedField, std::string("missing field ") + key);
  }
  if (!it->is_string()) {
    fail(ValidationErrc::kMalformedField, std::string("field is not a string: ") + key);
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& raw, const char* key) {
  auto it = raw.find(key);
  if (it == raw.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    fail(ValidationErrc::kMalformedField, std::string("field is not a string: ") + key);
  }
  return it->get<std::string>();
}

double required_number(const nlohmann::json& raw, const char* key) {
  auto it = raw.find(key);
  if (it == raw.end() || !it->is_number()) {
    fail(ValidationErrc::kMalformedField, std::string("missing numeric field ") + key);
  }
  return it->get<double>();
}

void check_ranges(const FlightPosition& p) {
  if (!std::isfinite(p.location.lat) || p.location.lat < -90.0 || p.location.lat > 90.0) {
    fail(ValidationErrc::kOutOfRange, "lat out of range");
  }
  if (!std::isfinite(p.location.lng) || p.location.lng < -180.0 || p.location.lng > 180.0) {
    fail(ValidationErrc::kOutOfRange, "lng out of range");
  }
  if (!std::isfinite(p.alt) || p.alt < 0.0) fail(ValidationErrc::kOutOfRange, "alt out of range");
  if (!std::isfinite(p.speed) || p.speed < 0.0) {
    fail(ValidationErrc::kOutOfRange, "speed out of range");
  }
  if (!std::isfinite(p.dir)) fail(ValidationErrc::kOutOfRange, "dir is not finite");
  if (p.updated.seconds < 0) fail(ValidationErrc::kOutOfRange, "updated is negative");
}

FlightPosition normalized(FlightPosition p) {
  if (p.flight_icao.empty()) fail(ValidationErrc::kMissingKeyField, "flight_icao is empty");
  check_ranges(p);
  p.location.lng = normalize_longitude(p.location.lng);
  p.dir = normalize_heading(p.dir);
  return p;
}

}  // namespace

FlightPosition validate_position(const nlohmann::json& raw) {
  if (!raw.is_object()) fail(ValidationErrc::kMalformedField, "entry is not an object");

  auto icao = raw.find("flight_icao");
  if (icao == raw.end() || icao->is_null() ||
      (icao->is_string() && icao->get_ref<const std::string&>().empty())) {
    fail(ValidationErrc::kMissingKeyField, "missing flight_icao");
  }

  FlightPosition p;
  p.flight_icao = required_string(raw, "flight_icao");
  p.reg_number = optional_string(raw, "reg_number");
  p.flight_iata = optional_string(raw, "flight_iata");
  p.airline_icao = required_string(raw, "airline_icao");
  p.dep_icao = required_string(raw, "dep_icao");
  p.arr_icao = required_string(raw, "arr_icao");
  p.location.lat = required_number(raw, "lat");
  p.location.lng = required_number(raw, "lng");
  p.alt = required_number(raw, "alt");
  p.dir = required_number(raw, "dir");
  p.speed = required_number(raw, "speed");

  auto status = parse_flight_status(required_string(raw, "status"));
  if (!status) fail(ValidationErrc::kMalformedField, "unknown status");
  p.status = *status;

  auto updated = raw.find("updated");
  if (updated == raw.end() || !updated->is_number_integer()) {
    fail(ValidationErrc::kMalformedField, "updated must be an integer");
  }
  if (updated->is_number_unsigned()) {
    auto u = updated->get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(INT64_MAX)) {
      fail(ValidationErrc::kOutOfRange, "updated out of range");
    }
  }
  p.updated = EventTime{updated->get<std::int64_t>()};

  return normalized(std::move(p));
}

FlightPosition validate_position(const FlightPosition& position) {
  return normalized(position);
}

nlohmann::json to_json(const FlightPosition& p) {
  nlohmann::json j = {
      {"flight_icao", p.flight_icao},
      {"airline_icao", p.airline_icao},
      {"dep_icao", p.dep_icao},
      {"arr_icao", p.arr_icao},
      {"lat", p.location.lat},
      {"lng", p.location.lng},
      {"alt", p.alt},
      {"dir", p.dir},
      {"speed", p.speed},
      {"status", std::string(to_string(p.status))},
      {"updated", p.updated.seconds},
  };
  if (p.reg_number) j["reg_number"] = *p.reg_number;
  if (p.flight_iata) j["flight_iata"] = *p.flight_iata;
  return j;
}

}  // namespace skystream
