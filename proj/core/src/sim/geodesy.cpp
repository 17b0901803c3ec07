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

#include "skystream/sim/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace skystream::sim {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Angular tolerance used to classify degenerate endpoints (~6 mm on Earth).
constexpr double kDegenerateEpsilon = 1e-12;

}  // namespace

double central_angle(const GeoPoint& p, const GeoPoint& q) {
  // Fixed argument order keeps the result bit-for-bit symmetric.
  const bool swap = std::tie(q.lat, q.lng) < std::tie(p.lat, p.lng);
  const GeoPoint& a = swap ? q : p;
  const GeoPoint& b = swap ? p : q;
  // atan2 of cross and dot products stays accurate near 0 and near pi.
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlng = (b.lng - a.lng) * kDegToRad;
  const double x = std::cos(lat2) * std::sin(dlng);
  const double y = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlng);
  const double dot = std::sin(lat1) * std::sin(lat2) + std::cos(lat1) * std::cos(lat2) * std::cos(dlng);
  return std::atan2(std::hypot(x, y), dot);
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  return kEarthRadiusKm * central_angle(a, b);
}

bool is_antipodal(const GeoPoint& a, const GeoPoint& b) {
  return std::numbers::pi - central_angle(a, b) < kDegenerateEpsilon;
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  const double delta = central_angle(a, b);
  if (delta < kDegenerateEpsilon) throw DegenerateRoute("bearing between identical points");
  if (std::numbers::pi - delta < kDegenerateEpsilon) {
    throw DegenerateRoute("bearing between antipodal points");
  }
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlng = (b.lng - a.lng) * kDegToRad;
  const double y = std::sin(dlng) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlng);
  return normalize_heading(std::atan2(y, x) * kRadToDeg);
}

GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction) {
  const double delta = central_angle(a, b);
  if (std::numbers::pi - delta < kDegenerateEpsilon) {
    throw DegenerateRoute("interpolation between antipodal points");
  }
  if (fraction <= 0.0) return a;
  if (fraction >= 1.0) return b;
  if (delta < kDegenerateEpsilon) return a;

  const double lat1 = a.lat * kDegToRad;
  const double lng1 = a.lng * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double lng2 = b.lng * kDegToRad;
  const double sin_delta = std::sin(delta);
  const double wa = std::sin((1.0 - fraction) * delta) / sin_delta;
  const double wb = std::sin(fraction * delta) / sin_delta;

  const double x = wa * std::cos(lat1) * std::cos(lng1) + wb * std::cos(lat2) * std::cos(lng2);
  const double y = wa * std::cos(lat1) * std::sin(lng1) + wb * std::cos(lat2) * std::sin(lng2);
  const double z = wa * std::sin(lat1) + wb * std::sin(lat2);

  GeoPoint p;
  p.lat = std::atan2(z, std::sqrt(x * x + y * y)) * kRadToDeg;
  p.lng = normalize_longitude(std::atan2(y, x) * kRadToDeg);
  return p;
}

}  // namespace skystream::sim
