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

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "skystream/sim/airports.hpp"
#include "skystream/sim/api_adapter.hpp"
#include "skystream/sim/fleet.hpp"
#include "skystream/sim/geodesy.hpp"
#include "skystream/sim/rng.hpp"
#include "test_support.hpp"

namespace skystream::sim {
namespace {

const GeoPoint kJfk{40.6413, -73.7781};
const GeoPoint kLax{33.9416, -118.4085};

// Values from tests/oracles/reference_values.py.
constexpr double kOracleJfkLaxKm = 3974.336199990807;
constexpr double kOracleJfkLaxBearing = 273.8419612742331;

TEST(Haversine, IdenticalPointsAreZero) { EXPECT_EQ(haversine_km({40.0, -74.0}, {40.0, -74.0}), 0.0); }

TEST(Haversine, HalfCircumferenceOnEquator) {
  EXPECT_NEAR(haversine_km({0, 0}, {0, 180}), std::numbers::pi * 6371.0, 1e-9);
  EXPECT_NEAR(haversine_km({0, 0}, {0, 180}), 20015.09, 0.005);
}

TEST(Haversine, JfkLaxMatchesOracle) { EXPECT_NEAR(haversine_km(kJfk, kLax), kOracleJfkLaxKm, 0.1); }

TEST(Haversine, Symmetric) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lat(-90, 90), lng(-179.999, 180);
  for (int i = 0; i < 1000; ++i) {
    GeoPoint a{lat(rng), lng(rng)}, b{lat(rng), lng(rng)};
    EXPECT_EQ(haversine_km(a, b), haversine_km(b, a));
  }
}

TEST(InitialBearing, CardinalDirections) {
  EXPECT_NEAR(initial_bearing({0, 0}, {10, 0}), 0.0, 1e-12);
  EXPECT_NEAR(initial_bearing({0, 0}, {0, 10}), 90.0, 1e-12);
  EXPECT_NEAR(initial_bearing(kJfk, kLax), kOracleJfkLaxBearing, 0.01);
}

TEST(InitialBearing, DegenerateRoutesThrow) {
  EXPECT_THROW(initial_bearing(kJfk, kJfk), DegenerateRoute);
  EXPECT_THROW(initial_bearing({10, 20}, {-10, -160}), DegenerateRoute);
}

TEST(IntermediatePoint, EndpointsAreExact) {
  EXPECT_EQ(intermediate_point(kJfk, kLax, 0.0), kJfk);
  EXPECT_EQ(intermediate_point(kJfk, kLax, 1.0), kLax);
  EXPECT_THROW(intermediate_point({0, 0}, {0, 180}, 0.5), DegenerateRoute);
}

TEST(IntermediatePoint, DistanceProportionalAndAdditive) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lat(-80, 80), lng(-179, 179), frac(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    GeoPoint a{lat(rng)}, b{lat(rng)};
    a.lng = lng(rng);
    b.lng = lng(rng);
    if (is_antipodal(a, b) || haversine_km(a, b) < 1.0 || haversine_km(a, b) > 19000.0) continue;
    double f1 = frac(rng), f2 = frac(rng);
    if (f1 > f2) std::swap(f1, f2);
    const double d = haversine_km(a, b);
    const auto p1 = intermediate_point(a, b, f1);
    const auto p2 = intermediate_point(a, b, f2);
    EXPECT_NEAR(haversine_km(a, p1), f1 * d, 1e-6 * d + 1e-7);
    // Same great circle: a -> p1 -> p2 -> b adds up to a -> b.
    const double path = haversine_km(a, p1) + haversine_km(p1, p2) + haversine_km(p2, b);
    EXPECT_NEAR(path, d, 1e-6 * d);
  }
}

TEST(SimRng, SplitmixSeedingIsStable) {
  SimRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  SimRng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(SimRng, Splitmix64ReferenceSequence) {
  // Reference outputs of splitmix64 from seed 0.
  std::uint64_t s = 0;
  EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(s), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(splitmix64(s), 0x06c45d188009454fULL);
}

TEST(Airports, EmbeddedTableIsValid) {
  const auto& airports = embedded_airports();
  EXPECT_EQ(airports.size(), 30u);
  std::set<std::string> icaos;
  for (const auto& a : airports) {
    EXPECT_TRUE(icaos.insert(a.icao).second) << a.icao;
    EXPECT_EQ(a.icao.size(), 4u);
    EXPECT_EQ(a.state.size(), 2u);
    EXPECT_TRUE(is_valid_point(a.location));
  }
}

TEST(Airports, ParseRejectsBadRows) {
  EXPECT_EQ(parse_airport_table("icao,lat,lng,state\nKJFK,40.6,-73.7,NY\nKLAX,33.9,-118.4,CA\n").size(), 2u);
  EXPECT_THROW(parse_airport_table("icao,lat,lng,state\nKJFK,abc,-73.7,NY\n"), AirportTableError);
  EXPECT_THROW(parse_airport_table("icao,lat,lng,state\nKJFK,40,-73,NY\nKJFK,41,-74,NY\n"), AirportTableError);
}

TEST(AltitudeProfile, Trapezoid) {
  FlightPlan plan;
  plan.cruise_alt = 10000.0;
  plan.climb_fraction = 0.1;
  plan.descent_fraction = 0.1;
  EXPECT_DOUBLE_EQ(altitude_at(plan, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(altitude_at(plan, 0.5), 10000.0);
  EXPECT_DOUBLE_EQ(altitude_at(plan, 0.05), 5000.0);
  EXPECT_NEAR(altitude_at(plan, 0.95), 5000.0, 1e-9);
  EXPECT_DOUBLE_EQ(altitude_at(plan, 1.0), 0.0);
}

FlightPlan jfk_lax_plan() {
  const auto& airports = embedded_airports();
  FlightPlan plan;
  plan.flight_icao = "TST1";
  plan.airline_icao = "TST";
  for (const auto& a : airports) {
    if (a.icao == "KJFK") plan.dep = a;
    if (a.icao == "KLAX") plan.arr = a;
  }
  plan.depart_time = EventTime{1000};
  plan.cruise_speed = 800.0;
  plan.cruise_alt = 11000.0;
  return plan;
}

TEST(PositionAt, LifecycleStates) {
  const auto plan = jfk_lax_plan();
  const auto before = position_at(plan, EventTime{999});
  EXPECT_EQ(before.status, FlightStatus::kScheduled);
  EXPECT_EQ(before.location, plan.dep.location);

  const auto after = position_at(plan, EventTime{1000 + 100'000});
  EXPECT_EQ(after.status, FlightStatus::kLanded);
  EXPECT_EQ(after.location, plan.arr.location);
  EXPECT_EQ(after.alt, 0.0);

  const EventTime mid{1000 + 3 * 3600};
  const auto p = position_at(plan, mid);
  EXPECT_EQ(p.status, FlightStatus::kEnRoute);
  const double f = route_fraction_at(plan, mid);
  const double expected_f = 800.0 * 3.0 / haversine_km(plan.dep.location, plan.arr.location);
  EXPECT_NEAR(f, expected_f, 1e-12);
  const auto q = intermediate_point(plan.dep.location, plan.arr.location, f);
  EXPECT_NEAR(p.location.lat, q.lat, 1e-9);
  EXPECT_NEAR(p.location.lng, q.lng, 1e-9);
  EXPECT_NEAR(p.dir, initial_bearing(q, plan.arr.location), 1e-9);
}

TEST(SimConfigValidation, RejectsNonPositiveCounts) {
  SimConfig cfg;
  cfg.flight_count = 0;
  EXPECT_THROW(cfg.validate(), InvalidSimConfig);
  cfg = {};
  cfg.tick_seconds = 0;
  EXPECT_THROW(cfg.validate(), InvalidSimConfig);
  EXPECT_NO_THROW(SimConfig{}.validate());
}

TEST(GenerateFleet, DeterministicAndUnique) {
  SimConfig cfg;
  const auto a = generate_fleet(cfg, embedded_airports());
  const auto b = generate_fleet(cfg, embedded_airports());
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 500u);
  std::set<std::string> ids;
  for (const auto& p : a) {
    ids.insert(p.flight_icao);
    EXPECT_NE(p.dep.icao, p.arr.icao);
    EXPECT_NO_THROW(validate_plan(p));
  }
  EXPECT_EQ(ids.size(), 500u);

  cfg.seed = 43;
  EXPECT_NE(generate_fleet(cfg, embedded_airports()), a);
}

TEST(GenerateFleet, NeedsTwoAirports) {
  std::vector<Airport> one{embedded_airports().front()};
  EXPECT_THROW(generate_fleet(SimConfig{}, one), InsufficientAirports);
}

TEST(Tick, EmptyBeforeDepartureAndAfterLanding) {
  SimConfig cfg;
  const auto fleet = generate_fleet(cfg, embedded_airports());
  EXPECT_TRUE(tick(fleet, EventTime{cfg.start_time.seconds - 1}).empty());
  EXPECT_TRUE(tick(fleet, EventTime{cfg.start_time.seconds + 10 * 86400}).empty());
}

TEST(Tick, MatchesBruteForceAirborneCount) {
  SimConfig cfg;
  const auto fleet = generate_fleet(cfg, embedded_airports());
  for (std::int64_t dt = 0; dt < 6 * 3600; dt += 877) {
    const EventTime t{cfg.start_time.seconds + dt};
    std::size_t airborne = 0;
    for (const auto& plan : fleet) {
      // Independent recomputation of the route fraction.
      const double elapsed_h = static_cast<double>(t.seconds - plan.depart_time.seconds) / 3600.0;
      const double f = plan.cruise_speed * elapsed_h / haversine_km(plan.dep.location, plan.arr.location);
      if (f > 0.0 && f < 1.0) ++airborne;
    }
    const auto positions = tick(fleet, t);
    EXPECT_EQ(positions.size(), airborne) << "t=" << t.seconds;
    for (const auto& p : positions) {
      EXPECT_EQ(validate_position(p), p);
      EXPECT_EQ(p.status, FlightStatus::kEnRoute);
      EXPECT_EQ(p.updated, t);
    }
  }
}

TEST(TickProperty, RandomConfigsEmitValidPositions) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    SimConfig cfg;
    cfg.seed = rng();
    cfg.flight_count = 1 + static_cast<std::int64_t>(rng() % 200);
    cfg.departure_spread_seconds = static_cast<std::int64_t>(rng() % 7200);
    const auto fleet = generate_fleet(cfg, embedded_airports());
    for (std::int64_t dt = 0; dt < 4 * 3600; dt += 1800) {
      for (const auto& p : tick(fleet, EventTime{cfg.start_time.seconds + dt})) {
        EXPECT_EQ(validate_position(p), p);
        EXPECT_GE(p.alt, 0.0);
      }
    }
  }
}

TEST(ApiAdapter, FixturePage) {
  const auto r = parse_api_response(skystream::testing::read_file(skystream::testing::fixture("api_page1.json")));
  ASSERT_EQ(r.positions.size(), 2u);
  EXPECT_EQ(r.dead_letter, 1u);
  EXPECT_EQ(r.positions[0].flight_icao, "UAL123");
  EXPECT_EQ(r.positions[0].reg_number, "N123UA");
  EXPECT_EQ(r.positions[0].flight_iata, "UA123");
  EXPECT_EQ(r.positions[1].flight_icao, "DAL456");
  EXPECT_FALSE(r.positions[1].flight_iata.has_value());
  EXPECT_DOUBLE_EQ(r.positions[1].dir, 359.5);
}

TEST(ApiAdapter, EnvelopeShape) {
  const auto r = parse_api_response(R"({"response": []})");
  EXPECT_TRUE(r.positions.empty());
  EXPECT_EQ(r.dead_letter, 0u);
  EXPECT_THROW(parse_api_response("[1,2]"), MalformedEnvelope);
  EXPECT_THROW(parse_api_response("not json"), MalformedEnvelope);
  EXPECT_THROW(parse_api_response(R"({"data": []})"), MalformedEnvelope);
}

TEST(ApiAdapter, UnreachableEndpointIsApiUnavailable) {
  ApiClientOptions opts;
  opts.base_url = "http://127.0.0.1:1";
  opts.timeout = std::chrono::seconds(2);
  EXPECT_THROW(fetch_api_page(opts), ApiUnavailable);
}

}  // namespace
}  // namespace skystream::sim
