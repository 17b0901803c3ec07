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

#include "skystream/index/query.hpp"

#include <algorithm>
#include <cmath>

namespace skystream::index {

std::string_view to_string(FieldType type) {
  switch (type) {
    case FieldType::kString: return "string";
    case FieldType::kNumber: return "number";
    case FieldType::kTime: return "time";
    case FieldType::kGeoPoint: return "geo_point";
  }
  return "unknown";
}

std::string_view to_string(IndexErrc code) {
  switch (code) {
    case IndexErrc::kUnknownIndex: return "UnknownIndex";
    case IndexErrc::kIndexExists: return "IndexExists";
    case IndexErrc::kMappingConflict: return "MappingConflict";
    case IndexErrc::kMalformedQuery: return "MalformedQuery";
    case IndexErrc::kTypeMismatch: return "TypeMismatch";
    case IndexErrc::kCorruptSnapshot: return "CorruptSnapshot";
    case IndexErrc::kInvalidConfig: return "InvalidConfig";
    case IndexErrc::kIo: return "Io";
  }
  return "Unknown";
}

FieldType type_of(const FieldValue& value) { return static_cast<FieldType>(value.index()); }

std::string fold_case(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::int64_t bucket_start(std::int64_t ts, std::int64_t interval) {
  auto q = ts / interval;
  if (ts % interval != 0 && ts < 0) --q;
  return q * interval;
}

namespace {

[[noreturn]] void malformed(const std::string& what) { throw IndexError(IndexErrc::kMalformedQuery, what); }

void check_field(const std::string& field) {
  if (field.empty()) malformed("field name must be non-empty");
}

bool bbox_point_ok(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lng) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lng >= -180.0 && p.lng <= 180.0;
}

std::optional<double> numeric_value(const FieldValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* t = std::get_if<EventTime>(&v)) return static_cast<double>(t->seconds);
  return std::nullopt;
}

}  // namespace

void validate(const Query& query) {
  std::visit(
      [](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, TermQuery>) {
          check_field(q.field);
          if (const auto* d = std::get_if<double>(&q.value); d && !std::isfinite(*d)) {
            malformed("term value must be finite");
          }
        } else if constexpr (std::is_same_v<T, RangeQuery>) {
          check_field(q.field);
          if ((q.min && std::isnan(*q.min)) || (q.max && std::isnan(*q.max))) {
            malformed("range bound is NaN");
          }
        } else if constexpr (std::is_same_v<T, GeoBBoxQuery>) {
          check_field(q.field);
          if (!bbox_point_ok(q.top_left) || !bbox_point_ok(q.bottom_right)) {
            malformed("geo_bbox corner out of range");
          }
          if (q.top_left.lat < q.bottom_right.lat) malformed("geo_bbox top is below bottom");
        } else if constexpr (std::is_same_v<T, BoolQuery>) {
          for (const auto& c : q.must) validate(c);
          for (const auto& c : q.should) validate(c);
          for (const auto& c : q.must_not) validate(c);
        }
      },
      query.node);
}

void validate(const Aggregation& agg) {
  std::visit(
      [](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        check_field(a.field);
        if constexpr (std::is_same_v<T, TermsAgg>) {
          if (a.top_k < 1) malformed("terms top_k must be >= 1");
        } else if constexpr (std::is_same_v<T, DateHistogramAgg>) {
          if (a.interval_seconds < 1) malformed("date_histogram interval_seconds must be >= 1");
        } else if constexpr (std::is_same_v<T, GeohashGridAgg>) {
          if (a.precision < 1 || a.precision > 12) malformed("geohash_grid precision must be in [1, 12]");
        }
      },
      agg);
}

bool in_bbox(const GeoPoint& p, const GeoBBoxQuery& q) {
  if (p.lat > q.top_left.lat || p.lat < q.bottom_right.lat) return false;
  if (q.top_left.lng <= q.bottom_right.lng) return p.lng >= q.top_left.lng && p.lng <= q.bottom_right.lng;
  return p.lng >= q.top_left.lng || p.lng <= q.bottom_right.lng;
}

bool in_range(double v, const RangeQuery& q) {
  if (q.min && (q.include_min ? v < *q.min : v <= *q.min)) return false;
  if (q.max && (q.include_max ? v > *q.max : v >= *q.max)) return false;
  return true;
}

bool matches(const Document& doc, const Query& query) {
  return std::visit(
      [&doc](const auto& q) -> bool {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, MatchAllQuery>) {
          return true;
        } else if constexpr (std::is_same_v<T, TermQuery>) {
          auto it = doc.find(q.field);
          if (it == doc.end()) return false;
          if (const auto* s = std::get_if<std::string>(&q.value)) {
            const auto* field = std::get_if<std::string>(&it->second);
            return field && fold_case(*field) == fold_case(*s);
          }
          auto v = numeric_value(it->second);
          return v && *v == std::get<double>(q.value);
        } else if constexpr (std::is_same_v<T, RangeQuery>) {
          auto it = doc.find(q.field);
          if (it == doc.end()) return false;
          auto v = numeric_value(it->second);
          return v && in_range(*v, q);
        } else if constexpr (std::is_same_v<T, GeoBBoxQuery>) {
          auto it = doc.find(q.field);
          if (it == doc.end()) return false;
          const auto* p = std::get_if<GeoPoint>(&it->second);
          return p && in_bbox(*p, q);
        } else {
          for (const auto& c : q.must) {
            if (!matches(doc, c)) return false;
          }
          for (const auto& c : q.must_not) {
            if (matches(doc, c)) return false;
          }
          if (q.should.empty()) return true;
          return std::any_of(q.should.begin(), q.should.end(), [&doc](const Query& c) { return matches(doc, c); });
        }
      },
      query.node);
}

}  // namespace skystream::index
