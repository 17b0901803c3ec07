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

#include "skystream/index/geohash.hpp"

#include <stdexcept>

namespace skystream::index {
namespace {

constexpr std::string_view kAlphabet = "0123456789bcdefghjkmnpqrstuvwxyz";

}  // namespace

std::string geohash_encode(const GeoPoint& p, int precision) {
  if (precision < 1 || precision > kMaxGeohashPrecision) {
    throw std::invalid_argument("geohash precision must be in [1, 12]");
  }
  double lat_lo = -90.0, lat_hi = 90.0;
  double lng_lo = -180.0, lng_hi = 180.0;
  std::string out;
  out.reserve(static_cast<std::size_t>(precision));
  bool lng_bit = true;
  int bits = 0;
  int value = 0;
  while (static_cast<int>(out.size()) < precision) {
    double& lo = lng_bit ? lng_lo : lat_lo;
    double& hi = lng_bit ? lng_hi : lat_hi;
    const double v = lng_bit ? p.lng : p.lat;
    const double mid = (lo + hi) / 2.0;
    value <<= 1;
    if (v >= mid) {
      value |= 1;
      lo = mid;
    } else {
      hi = mid;
    }
    lng_bit = !lng_bit;
    if (++bits == 5) {
      out.push_back(kAlphabet[static_cast<std::size_t>(value)]);
      bits = 0;
      value = 0;
    }
  }
  return out;
}

GeoBounds geohash_bounds(std::string_view cell) {
  GeoBounds b;
  bool lng_bit = true;
  for (char c : cell) {
    const auto idx = kAlphabet.find(c);
    if (idx == std::string_view::npos) throw std::invalid_argument("invalid geohash character");
    for (int bit = 4; bit >= 0; --bit) {
      const bool set = (idx >> bit) & 1;
      double& lo = lng_bit ? b.min_lng : b.min_lat;
      double& hi = lng_bit ? b.max_lng : b.max_lat;
      const double mid = (lo + hi) / 2.0;
      (set ? lo : hi) = mid;
      lng_bit = !lng_bit;
    }
  }
  return b;
}

GeoPoint geohash_center(std::string_view cell) {
  const auto b = geohash_bounds(cell);
  return {(b.min_lat + b.max_lat) / 2.0, (b.min_lng + b.max_lng) / 2.0};
}

}  // namespace skystream::index
