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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "skystream/index/document.hpp"

namespace skystream::index {

struct Query;

struct MatchAllQuery {
  bool operator==(const MatchAllQuery&) const = default;
};

/// Exact match. String values compare case-folded against string fields;
/// numeric values compare against number and time fields.
struct TermQuery {
  std::string field;
  std::variant<std::string, double> value;

  bool operator==(const TermQuery&) const = default;
};

/// Bounds over number or time fields (time in epoch seconds).
struct RangeQuery {
  std::string field;
  std::optional<double> min;
  std::optional<double> max;
  bool include_min{true};
  bool include_max{true};

  bool operator==(const RangeQuery&) const = default;
};

/// Inclusive box. top_left.lng > bottom_right.lng wraps across the antimeridian.
struct GeoBBoxQuery {
  std::string field;
  GeoPoint top_left;
  GeoPoint bottom_right;

  bool operator==(const GeoBBoxQuery&) const = default;
};

/// Conjunction of `must`, at least one of `should` when non-empty, none of
/// `must_not`. All lists empty behaves as match_all.
struct BoolQuery {
  std::vector<Query> must;
  std::vector<Query> should;
  std::vector<Query> must_not;

  bool operator==(const BoolQuery&) const;
};

struct Query {
  std::variant<MatchAllQuery, TermQuery, RangeQuery, GeoBBoxQuery, BoolQuery> node;

  bool operator==(const Query&) const = default;
};

inline bool BoolQuery::operator==(const BoolQuery& o) const {
  return must == o.must && should == o.should && must_not == o.must_not;
}

inline Query match_all() { return Query{MatchAllQuery{}}; }

struct TermsAgg {
  std::string field;
  int top_k{10};
};

struct DateHistogramAgg {
  std::string field;
  std::int64_t interval_seconds{60};
};

struct StatsAgg {
  std::string field;
};

struct GeohashGridAgg {
  std::string field;
  int precision{4};
};

using Aggregation = std::variant<TermsAgg, DateHistogramAgg, StatsAgg, GeohashGridAgg>;

/// Bucket key: a folded string term, or a number (time fields use seconds).
using TermKey = std::variant<std::string, double>;

struct TermsBucket {
  TermKey key;
  std::uint64_t count{0};
  bool operator==(const TermsBucket&) const = default;
};

struct TermsResult {
  std::vector<TermsBucket> buckets;
  /// Documents with the field whose term fell outside top_k.
  std::uint64_t other_count{0};
  bool operator==(const TermsResult&) const = default;
};

struct HistogramBucket {
  std::int64_t start{0};
  std::uint64_t count{0};
  bool operator==(const HistogramBucket&) const = default;
};

struct DateHistogramResult {
  std::vector<HistogramBucket> buckets;
  bool operator==(const DateHistogramResult&) const = default;
};

struct StatsResult {
  std::uint64_t count{0};
  std::optional<double> min;
  std::optional<double> max;
  double sum{0.0};
  std::optional<double> avg;
  bool operator==(const StatsResult&) const = default;
};

struct GeoCellBucket {
  std::string cell;
  std::uint64_t count{0};
  bool operator==(const GeoCellBucket&) const = default;
};

struct GeohashGridResult {
  std::vector<GeoCellBucket> buckets;
  bool operator==(const GeohashGridResult&) const = default;
};

using AggregationResult = std::variant<TermsResult, DateHistogramResult, StatsResult, GeohashGridResult>;

/// Structural checks shared by every entry point (bbox orientation, agg
/// parameters). Throws IndexError(kMalformedQuery).
void validate(const Query& query);
void validate(const Aggregation& agg);

bool in_bbox(const GeoPoint& p, const GeoBBoxQuery& box);
bool in_range(double value, const RangeQuery& range);

/// Evaluates a query against one document without an index.
bool matches(const Document& doc, const Query& query);

/// floor(ts / interval) * interval, correct for negative timestamps.
std::int64_t bucket_start(std::int64_t ts, std::int64_t interval);

}  // namespace skystream::index
