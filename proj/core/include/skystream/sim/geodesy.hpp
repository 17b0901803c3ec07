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

#include <stdexcept>

#include "skystream/model/flight_position.hpp"

namespace skystream::sim {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Raised when a great-circle path between two points is undefined.
class DegenerateRoute : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

/// Central angle between two points, radians.
double central_angle(const GeoPoint& a, const GeoPoint& b);

/// Forward azimuth from a toward b in [0, 360). Throws DegenerateRoute for
/// identical or antipodal endpoints.
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

/// Point at `fraction` of the way along the great circle from a to b.
/// fraction 0 and 1 return the endpoints exactly.
GeoPoint intermediate_point(const GeoPoint& a, const GeoPoint& b, double fraction);

bool is_antipodal(const GeoPoint& a, const GeoPoint& b);

}  // namespace skystream::sim
