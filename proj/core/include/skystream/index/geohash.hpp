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

#include <string>
#include <string_view>

#include "skystream/model/flight_position.hpp"

namespace skystream::index {

inline constexpr int kMaxGeohashPrecision = 12;

struct GeoBounds {
  double min_lat{-90.0};
  double max_lat{90.0};
  double min_lng{-180.0};
  double max_lng{180.0};
};

/// Standard base-32 geohash with longitude bits first. precision in [1, 12].
std::string geohash_encode(const GeoPoint& p, int precision);

/// Cell bounds; throws std::invalid_argument on characters outside the alphabet.
GeoBounds geohash_bounds(std::string_view cell);
GeoPoint geohash_center(std::string_view cell);

}  // namespace skystream::index
