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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "skystream/model/flight_position.hpp"
#include "skystream/sim/airports.hpp"

namespace skystream::sim {

struct FlightPlan {
  std::string flight_icao;
  std::string flight_iata;
  std::string airline_icao;
  std::string reg_number;
  Airport dep;
  Airport arr;
  EventTime depart_time;
  double cruise_speed{0.0};     // km/h
  double cruise_alt{0.0};       // meters
  double climb_fraction{0.1};   // share of route spent climbing
  double descent_fraction{0.1}; // share of route spent descending

  bool operator==(const FlightPlan&) const = default;
};

struct SimConfig {
  std::uint64_t seed{42};
  std::int64_t flight_count{500};
  std::int64_t tick_seconds{5};
  EventTime start_time{1'700'000'000};
  /// Departures are spread uniformly over this many seconds after start_time.
  std::int64_t departure_spread_seconds{3600};

  /// Throws InvalidSimConfig.
  void validate() const;
};

class InvalidSimConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientAirports : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidFlightPlan : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InvalidFlightPlan when the plan breaks its invariants.
void validate_plan(const FlightPlan& plan);

double route_length_km(const FlightPlan& plan);

/// Trapezoidal climb/cruise/descent profile over the route fraction.
double altitude_at(const FlightPlan& plan, double route_fraction);

/// Share of the route flown at time t, clamped to [0, 1].
double route_fraction_at(const FlightPlan& plan, EventTime t);

/// State of a plan at time t: scheduled at the departure airport before
/// take-off, en-route along the great circle, landed at the arrival airport.
FlightPosition position_at(const FlightPlan& plan, EventTime t);

/// Deterministic fleet for (cfg.seed, airports). flight_icao values are unique.
std::vector<FlightPlan> generate_fleet(const SimConfig& cfg, std::span<const Airport> airports);

/// Positions of every plan that is airborne at t, in fleet order.
std::vector<FlightPosition> tick(std::span<const FlightPlan> fleet, EventTime t);

}  // namespace skystream::sim
