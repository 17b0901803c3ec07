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

#include "skystream/sim/fleet.hpp"

#include <algorithm>
#include <array>
#include <string_view>

#include "skystream/sim/geodesy.hpp"
#include "skystream/sim/rng.hpp"

namespace skystream::sim {
namespace {

struct Carrier {
  std::string_view icao;
  std::string_view iata;
};

constexpr std::array<Carrier, 8> kCarriers{{
    {"AAL", "AA"},
    {"DAL", "DL"},
    {"UAL", "UA"},
    {"SWA", "WN"},
    {"JBU", "B6"},
    {"ASA", "AS"},
    {"NKS", "NK"},
    {"FFT", "F9"},
}};

constexpr int kMaxRouteDraws = 64;

// Heading on arrival: reverse of the bearing from arrival back to departure.
double final_course(const FlightPlan& plan) {
  return normalize_heading(initial_bearing(plan.arr.location, plan.dep.location) + 180.0);
}

}  // namespace

void SimConfig::validate() const {
  if (flight_count <= 0) throw InvalidSimConfig("flight_count must be positive");
  if (tick_seconds <= 0) throw InvalidSimConfig("tick_seconds must be positive");
  if (start_time.seconds < 0) throw InvalidSimConfig("start_time must be non-negative");
  if (departure_spread_seconds <= 0) throw InvalidSimConfig("departure_spread_seconds must be positive");
}

void validate_plan(const FlightPlan& plan) {
  if (plan.dep.icao == plan.arr.icao) throw InvalidFlightPlan("departure equals arrival");
  if (!(plan.cruise_speed > 0.0)) throw InvalidFlightPlan("cruise_speed must be positive");
  if (!(plan.cruise_alt > 0.0)) throw InvalidFlightPlan("cruise_alt must be positive");
  if (!(plan.climb_fraction > 0.0 && plan.climb_fraction < 0.5)) {
    throw InvalidFlightPlan("climb_fraction must be in (0, 0.5)");
  }
  if (!(plan.descent_fraction > 0.0 && plan.descent_fraction < 0.5)) {
    throw InvalidFlightPlan("descent_fraction must be in (0, 0.5)");
  }
  if (is_antipodal(plan.dep.location, plan.arr.location)) {
    throw InvalidFlightPlan("antipodal route");
  }
}

double route_length_km(const FlightPlan& plan) {
  return haversine_km(plan.dep.location, plan.arr.location);
}

double altitude_at(const FlightPlan& plan, double route_fraction) {
  const double f = std::clamp(route_fraction, 0.0, 1.0);
  if (f < plan.climb_fraction) return plan.cruise_alt * f / plan.climb_fraction;
  const double descent_start = 1.0 - plan.descent_fraction;
  if (f > descent_start) return plan.cruise_alt * (1.0 - f) / plan.descent_fraction;
  return plan.cruise_alt;
}

double route_fraction_at(const FlightPlan& plan, EventTime t) {
  const auto elapsed = t.seconds - plan.depart_time.seconds;
  if (elapsed <= 0) return 0.0;
  const double length = route_length_km(plan);
  if (length <= 0.0) return 1.0;
  const double flown = plan.cruise_speed * static_cast<double>(elapsed) / 3600.0;
  return std::min(1.0, flown / length);
}

FlightPosition position_at(const FlightPlan& plan, EventTime t) {
  FlightPosition p;
  p.reg_number = plan.reg_number.empty() ? std::nullopt : std::optional(plan.reg_number);
  p.flight_icao = plan.flight_icao;
  p.flight_iata = plan.flight_iata.empty() ? std::nullopt : std::optional(plan.flight_iata);
  p.airline_icao = plan.airline_icao;
  p.dep_icao = plan.dep.icao;
  p.arr_icao = plan.arr.icao;
  p.updated = t;

  const double fraction = route_fraction_at(plan, t);
  if (t < plan.depart_time || fraction <= 0.0) {
    p.status = FlightStatus::kScheduled;
    p.location = plan.dep.location;
    p.dir = initial_bearing(plan.dep.location, plan.arr.location);
    return p;
  }
  if (fraction >= 1.0) {
    p.status = FlightStatus::kLanded;
    p.location = plan.arr.location;
    p.dir = final_course(plan);
    return p;
  }

  p.status = FlightStatus::kEnRoute;
  p.location = intermediate_point(plan.dep.location, plan.arr.location, fraction);
  p.alt = altitude_at(plan, fraction);
  p.speed = plan.cruise_speed;
  // Within a few meters of the runway the forward azimuth is ill-conditioned.
  p.dir = haversine_km(p.location, plan.arr.location) < 1e-3 ? final_course(plan)
                                                              : initial_bearing(p.location, plan.arr.location);
  return p;
}

std::vector<FlightPlan> generate_fleet(const SimConfig& cfg, std::span<const Airport> airports) {
  cfg.validate();
  if (airports.size() < 2) throw InsufficientAirports("fleet generation needs at least 2 airports");

  SimRng rng(cfg.seed);
  std::vector<FlightPlan> fleet;
  fleet.reserve(static_cast<std::size_t>(cfg.flight_count));
  const auto n = airports.size();

  for (std::int64_t i = 0; i < cfg.flight_count; ++i) {
    const auto& carrier = kCarriers[rng.below(kCarriers.size())];
    const auto number = std::to_string(100 + i);

    std::size_t dep = 0;
    std::size_t arr = 0;
    bool found = false;
    for (int attempt = 0; attempt < kMaxRouteDraws && !found; ++attempt) {
      dep = rng.below(n);
      arr = rng.below(n - 1);
      if (arr >= dep) ++arr;
      const auto& a = airports[dep].location;
      const auto& b = airports[arr].location;
      found = central_angle(a, b) > 1e-9 && !is_antipodal(a, b);
    }
    if (!found) throw InsufficientAirports("no non-degenerate route in airport table");

    FlightPlan plan;
    plan.airline_icao = std::string(carrier.icao);
    plan.flight_icao = plan.airline_icao + number;
    plan.flight_iata = std::string(carrier.iata) + number;
    plan.reg_number = "N" + std::to_string(10000 + i);
    plan.dep = airports[dep];
    plan.arr = airports[arr];
    plan.depart_time = EventTime{cfg.start_time.seconds +
                                 static_cast<std::int64_t>(rng.below(
                                     static_cast<std::uint64_t>(cfg.departure_spread_seconds)))};
    plan.cruise_speed = 780.0 + 120.0 * rng.uniform();
    plan.cruise_alt = 9500.0 + 2500.0 * rng.uniform();
    plan.climb_fraction = 0.05 + 0.15 * rng.uniform();
    plan.descent_fraction = 0.05 + 0.15 * rng.uniform();
    fleet.push_back(std::move(plan));
  }
  return fleet;
}

std::vector<FlightPosition> tick(std::span<const FlightPlan> fleet, EventTime t) {
  std::vector<FlightPosition> out;
  for (const auto& plan : fleet) {
    const double fraction = route_fraction_at(plan, t);
    if (fraction > 0.0 && fraction < 1.0) out.push_back(position_at(plan, t));
  }
  return out;
}

}  // namespace skystream::sim
