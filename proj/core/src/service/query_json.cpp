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

#include "skystream/service/query_json.hpp"

#include <set>

namespace skystream::service {

using nlohmann::json;

namespace {

constexpr int kMaxDepth = 32;

[[noreturn]] void bad(const std::string& what) { throw BadRequest(what); }

const json& single_entry(const json& j, const char* what, std::string& key) {
  if (!j.is_object() || j.size() != 1) bad(std::string(what) + " must be an object with exactly one key");
  key = j.begin().key();
  return j.begin().value();
}

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) bad(std::string(what) + " must be an object");
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      bad(std::string("unknown key '") + k + "' in " + what);
    }
  }
}

double number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

std::int64_t integer(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

std::string field_name(const json& j, const char* what) {
  if (!j.is_string() || j.get_ref<const std::string&>().empty()) bad(std::string(what) + " must be a non-empty string");
  return j.get<std::string>();
}

GeoPoint point(const json& j, const char* what) {
  only_keys(j, {"lat", "lng"}, what);
  if (!j.contains("lat") || !j.contains("lng")) bad(std::string(what) + " needs lat and lng");
  return {number(j.at("lat"), "lat"), number(j.at("lng"), "lng")};
}

json point_json(const GeoPoint& p) { return {{"lat", p.lat}, {"lng", p.lng}}; }

index::Query parse(const json& j, int depth) {
  if (depth > kMaxDepth) bad("query nesting is too deep");
  std::string kind;
  const auto& body = single_entry(j, "query", kind);

  if (kind == "match_all") {
    if (!body.is_object() || !body.empty()) bad("match_all takes an empty object");
    return index::match_all();
  }
  if (kind == "term") {
    std::string field;
    const auto& v = single_entry(body, "term", field);
    if (field.empty()) bad("term field must be non-empty");
    if (v.is_string()) return {index::TermQuery{field, v.get<std::string>()}};
    if (v.is_number()) return {index::TermQuery{field, v.get<double>()}};
    bad("term value must be a string or number");
  }
  if (kind == "range") {
    std::string field;
    const auto& b = single_entry(body, "range", field);
    if (field.empty()) bad("range field must be non-empty");
    only_keys(b, {"gte", "gt", "lte", "lt"}, "range");
    if (b.contains("gte") && b.contains("gt")) bad("range takes at most one of gte and gt");
    if (b.contains("lte") && b.contains("lt")) bad("range takes at most one of lte and lt");
    index::RangeQuery q{field, std::nullopt, std::nullopt, true, true};
    if (b.contains("gte")) q.min = number(b.at("gte"), "gte");
    if (b.contains("gt")) {
      q.min = number(b.at("gt"), "gt");
      q.include_min = false;
    }
    if (b.contains("lte")) q.max = number(b.at("lte"), "lte");
    if (b.contains("lt")) {
      q.max = number(b.at("lt"), "lt");
      q.include_max = false;
    }
    return {q};
  }
  if (kind == "geo_bbox") {
    std::string field;
    const auto& b = single_entry(body, "geo_bbox", field);
    if (field.empty()) bad("geo_bbox field must be non-empty");
    only_keys(b, {"top_left", "bottom_right"}, "geo_bbox");
    if (!b.contains("top_left") || !b.contains("bottom_right")) bad("geo_bbox needs top_left and bottom_right");
    return {index::GeoBBoxQuery{field, point(b.at("top_left"), "top_left"), point(b.at("bottom_right"), "bottom_right")}};
  }
  if (kind == "bool") {
    only_keys(body, {"must", "should", "must_not"}, "bool");
    index::BoolQuery q;
    auto clauses = [&](const char* key, std::vector<index::Query>& out) {
      if (!body.contains(key)) return;
      const auto& list = body.at(key);
      if (!list.is_array()) bad(std::string("bool.") + key + " must be an array");
      for (const auto& c : list) out.push_back(parse(c, depth + 1));
    };
    clauses("must", q.must);
    clauses("should", q.should);
    clauses("must_not", q.must_not);
    return {std::move(q)};
  }
  bad("unknown query type '" + kind + "'");
}

json clauses_json(const std::vector<index::Query>& qs) {
  json out = json::array();
  for (const auto& q : qs) out.push_back(query_to_json(q));
  return out;
}

}  // namespace

index::Query query_from_json(const json& j) { return parse(j, 0); }

json query_to_json(const index::Query& query) {
  return std::visit(
      [](const auto& q) -> json {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, index::MatchAllQuery>) {
          return {{"match_all", json::object()}};
        } else if constexpr (std::is_same_v<T, index::TermQuery>) {
          json v = std::visit([](const auto& x) { return json(x); }, q.value);
          return {{"term", {{q.field, v}}}};
        } else if constexpr (std::is_same_v<T, index::RangeQuery>) {
          json b = json::object();
          if (q.min) b[q.include_min ? "gte" : "gt"] = *q.min;
          if (q.max) b[q.include_max ? "lte" : "lt"] = *q.max;
          return {{"range", {{q.field, b}}}};
        } else if constexpr (std::is_same_v<T, index::GeoBBoxQuery>) {
          return {{"geo_bbox",
                   {{q.field, {{"top_left", point_json(q.top_left)}, {"bottom_right", point_json(q.bottom_right)}}}}}};
        } else {
          return {{"bool",
                   {{"must", clauses_json(q.must)}, {"should", clauses_json(q.should)},
                    {"must_not", clauses_json(q.must_not)}}}};
        }
      },
      query.node);
}

index::Aggregation aggregation_from_json(const json& j) {
  std::string kind;
  const auto& b = single_entry(j, "aggregation", kind);
  if (kind == "terms") {
    only_keys(b, {"field", "top_k"}, "terms");
    index::TermsAgg a{field_name(b.value("field", json()), "terms.field")};
    if (b.contains("top_k")) a.top_k = static_cast<int>(std::clamp<std::int64_t>(integer(b.at("top_k"), "top_k"), 0, 1'000'000));
    return a;
  }
  if (kind == "date_histogram") {
    only_keys(b, {"field", "interval_seconds"}, "date_histogram");
    if (!b.contains("interval_seconds")) bad("date_histogram needs interval_seconds");
    return index::DateHistogramAgg{field_name(b.value("field", json()), "date_histogram.field"),
                                   integer(b.at("interval_seconds"), "interval_seconds")};
  }
  if (kind == "stats") {
    only_keys(b, {"field"}, "stats");
    return index::StatsAgg{field_name(b.value("field", json()), "stats.field")};
  }
  if (kind == "geohash_grid") {
    only_keys(b, {"field", "precision"}, "geohash_grid");
    index::GeohashGridAgg a{field_name(b.value("field", json()), "geohash_grid.field")};
    if (b.contains("precision")) a.precision = static_cast<int>(std::clamp<std::int64_t>(integer(b.at("precision"), "precision"), 0, 13));
    return a;
  }
  bad("unknown aggregation type '" + kind + "'");
}

json aggregation_to_json(const index::Aggregation& agg) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, index::TermsAgg>) {
          return {{"terms", {{"field", a.field}, {"top_k", a.top_k}}}};
        } else if constexpr (std::is_same_v<T, index::DateHistogramAgg>) {
          return {{"date_histogram", {{"field", a.field}, {"interval_seconds", a.interval_seconds}}}};
        } else if constexpr (std::is_same_v<T, index::StatsAgg>) {
          return {{"stats", {{"field", a.field}}}};
        } else {
          return {{"geohash_grid", {{"field", a.field}, {"precision", a.precision}}}};
        }
      },
      agg);
}

json result_to_json(const index::AggregationResult& result) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        json out;
        if constexpr (std::is_same_v<T, index::TermsResult>) {
          out["buckets"] = json::array();
          for (const auto& b : r.buckets) {
            out["buckets"].push_back({{"key", std::visit([](const auto& k) { return json(k); }, b.key)}, {"count", b.count}});
          }
          out["other_count"] = r.other_count;
        } else if constexpr (std::is_same_v<T, index::DateHistogramResult>) {
          out["buckets"] = json::array();
          for (const auto& b : r.buckets) out["buckets"].push_back({{"start", b.start}, {"count", b.count}});
        } else if constexpr (std::is_same_v<T, index::StatsResult>) {
          out["count"] = r.count;
          out["min"] = r.min ? json(*r.min) : json(nullptr);
          out["max"] = r.max ? json(*r.max) : json(nullptr);
          out["sum"] = r.sum;
          out["avg"] = r.avg ? json(*r.avg) : json(nullptr);
        } else {
          out["buckets"] = json::array();
          for (const auto& b : r.buckets) out["buckets"].push_back({{"cell", b.cell}, {"count", b.count}});
        }
        return out;
      },
      result);
}

json value_to_json(const index::FieldValue& value) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EventTime>) {
          return v.seconds;
        } else if constexpr (std::is_same_v<T, GeoPoint>) {
          return point_json(v);
        } else {
          return v;
        }
      },
      value);
}

json document_to_json(const index::Document& doc) {
  json out = json::object();
  for (const auto& [k, v] : doc) out[k] = value_to_json(v);
  return out;
}

json hit_to_json(const index::IndexedDoc& doc) {
  return {{"_id", doc.doc_id}, {"_version", doc.version}, {"_source", document_to_json(doc.fields)}};
}

}  // namespace skystream::service
