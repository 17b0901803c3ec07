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
#include <string>

#include <nlohmann/json.hpp>

#include "skystream/index/index.hpp"

namespace skystream::service {

/// The request body does not describe a valid Query or Aggregation.
class BadRequest : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Query wire form:
//   {"match_all": {}}
//   {"term": {"<field>": <string|number>}}
//   {"range": {"<field>": {"gte"|"gt": n, "lte"|"lt": n}}}
//   {"geo_bbox": {"<field>": {"top_left": {"lat","lng"}, "bottom_right": {"lat","lng"}}}}
//   {"bool": {"must": [...], "should": [...], "must_not": [...]}}
// Aggregation wire form:
//   {"terms": {"field", "top_k"?}}           {"date_histogram": {"field", "interval_seconds"}}
//   {"stats": {"field"}}                     {"geohash_grid": {"field", "precision"?}}

index::Query query_from_json(const nlohmann::json& j);
nlohmann::json query_to_json(const index::Query& q);

index::Aggregation aggregation_from_json(const nlohmann::json& j);
nlohmann::json aggregation_to_json(const index::Aggregation& a);

nlohmann::json result_to_json(const index::AggregationResult& r);
nlohmann::json value_to_json(const index::FieldValue& v);
nlohmann::json document_to_json(const index::Document& doc);
/// {"_id", "_version", "_source"}
nlohmann::json hit_to_json(const index::IndexedDoc& doc);

}  // namespace skystream::service
