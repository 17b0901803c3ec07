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

#include "skystream/service/query_service.hpp"

#include <charconv>
#include <cmath>
#include <mutex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "skystream/service/query_json.hpp"

namespace skystream::service {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

std::string_view code_for_status(int status) {
  switch (status) {
    case 400: return "bad_request";
    case 404: return "not_found";
    case 409: return "mapping_conflict";
    default: return status >= 500 ? "internal" : "bad_request";
  }
}

Response ok(const json& body) { return {200, body.dump()}; }

// Runs a handler body, mapping failures onto the ApiError shape.
template <typename F>
Response guarded(F&& f) {
  try {
    return f();
  } catch (const BadRequest& e) {
    return api_error(400, "bad_request", e.what());
  } catch (const json::exception& e) {
    return api_error(400, "bad_request", e.what());
  } catch (const index::IndexError& e) {
    switch (e.code()) {
      case index::IndexErrc::kUnknownIndex: return api_error(404, "not_found", e.what());
      case index::IndexErrc::kMalformedQuery: return api_error(400, "bad_request", e.what());
      case index::IndexErrc::kMappingConflict:
      case index::IndexErrc::kTypeMismatch: return api_error(409, "mapping_conflict", e.what());
      default: return api_error(500, "internal", e.what());
    }
  } catch (const std::exception& e) {
    return api_error(500, "internal", e.what());
  }
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw BadRequest("bbox values must be numbers");
  }
  return v;
}

}  // namespace

Response api_error(int status, std::string_view code, std::string_view message) {
  return {status, json{{"status", status}, {"code", code}, {"message", message}}.dump()};
}

void DatasetRegistry::put(std::string id, std::string summary_json) {
  std::unique_lock lock(mu_);
  datasets_[std::move(id)] = std::move(summary_json);
}

std::optional<std::string> DatasetRegistry::get(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) return std::nullopt;
  return it->second;
}

bool DatasetRegistry::empty() const {
  std::shared_lock lock(mu_);
  return datasets_.empty();
}

QueryService::QueryService(index::IndexStore& store, const stream::PipelineMetrics* metrics,
                           const DatasetRegistry* datasets, ServiceOptions options)
    : store_(store), metrics_(metrics), datasets_(datasets), options_(std::move(options)) {
  store_.get_or_create({options_.indexes.positions});
  store_.get_or_create({options_.indexes.windows});
}

index::GeoBBoxQuery QueryService::parse_bbox(std::string_view text) {
  double v[4];
  std::size_t start = 0;
  for (int i = 0; i < 4; ++i) {
    const auto comma = text.find(',', start);
    if ((i < 3) == (comma == std::string_view::npos)) {
      throw BadRequest("bbox must be tl_lat,tl_lng,br_lat,br_lng");
    }
    v[i] = parse_double(text.substr(start, i < 3 ? comma - start : std::string_view::npos));
    start = comma + 1;
  }
  index::GeoBBoxQuery q{"location", {v[0], v[1]}, {v[2], v[3]}};
  try {
    index::validate(index::Query{q});
  } catch (const index::IndexError& e) {
    throw BadRequest(std::string("bbox: ") + e.what());
  }
  return q;
}

Response QueryService::live_flights(std::optional<std::string_view> bbox, std::optional<std::string_view> status,
                                    std::optional<std::string_view> airline) const {
  return guarded([&] {
    LiveFilter filter;
    if (bbox) filter.bbox = parse_bbox(*bbox);
    if (status) {
      filter.status = parse_flight_status(*status);
      if (!filter.status) throw BadRequest("unknown status '" + std::string(*status) + "'");
    }
    if (airline) filter.airline = index::fold_case(*airline);

    // Latest version per flight first; filters apply to that version only.
    std::map<std::string, FlightPosition> latest;
    auto idx = store_.get(options_.indexes.positions);
    idx->scan(index::Query{index::TermQuery{"doc_type", std::string("position")}}, [&](const index::IndexedDoc& d) {
      FlightPosition p;
      try {
        p = stream::position_from_document(d.fields);
      } catch (const ValidationError&) {
        return;
      }
      auto [it, inserted] = latest.try_emplace(p.flight_icao, p);
      if (!inserted && p.updated > it->second.updated) it->second = std::move(p);
    });

    std::int64_t as_of = 0;
    json flights = json::array();
    for (const auto& [icao, p] : latest) {
      as_of = std::max(as_of, p.updated.seconds);
      if (filter.bbox && !index::in_bbox(p.location, *filter.bbox)) continue;
      if (filter.status && p.status != *filter.status) continue;
      if (filter.airline && index::fold_case(p.airline_icao) != *filter.airline) continue;
      flights.push_back(to_json(p));
    }
    const auto total = flights.size();
    return ok({{"as_of", as_of}, {"flights", std::move(flights)}, {"total", total}});
  });
}

Response QueryService::search(std::string_view body) const {
  return guarded([&] {
    const auto req = json::parse(body);
    if (!req.is_object()) throw BadRequest("request body must be a JSON object");
    for (const auto& [k, _] : req.items()) {
      if (k != "index" && k != "query" && k != "aggs" && k != "size" && k != "sort") {
        throw BadRequest("unknown key '" + k + "' in search body");
      }
    }
    std::string name = options_.indexes.positions;
    if (req.contains("index")) {
      if (!req.at("index").is_string()) throw BadRequest("index must be a string");
      name = req.at("index").get<std::string>();
    }
    const auto query = req.contains("query") ? query_from_json(req.at("query")) : index::match_all();

    std::size_t size = 10;
    if (req.contains("size")) {
      const auto& s = req.at("size");
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0 ||
          static_cast<std::uint64_t>(s.get<std::int64_t>()) > options_.max_search_size) {
        throw BadRequest("size must be an integer in [0, " + std::to_string(options_.max_search_size) + "]");
      }
      size = s.get<std::size_t>();
    }

    std::optional<index::SortSpec> sort;
    if (req.contains("sort")) {
      const auto& s = req.at("sort");
      if (!s.is_object() || !s.contains("field") || !s.at("field").is_string()) {
        throw BadRequest("sort must be {\"field\": string, \"order\": \"asc\"|\"desc\"}");
      }
      sort = index::SortSpec{s.at("field").get<std::string>(), index::SortOrder::kAsc};
      const auto order = s.value("order", std::string("asc"));
      if (order == "desc") {
        sort->order = index::SortOrder::kDesc;
      } else if (order != "asc") {
        throw BadRequest("sort order must be asc or desc");
      }
    }

    std::vector<std::string> agg_names;
    std::vector<index::Aggregation> aggs;
    if (req.contains("aggs")) {
      if (!req.at("aggs").is_object()) throw BadRequest("aggs must be an object");
      for (const auto& [n, a] : req.at("aggs").items()) {
        agg_names.push_back(n);
        aggs.push_back(aggregation_from_json(a));
      }
    }

    const auto response = store_.get(name)->query(query, size, sort, aggs);
    json out;
    out["total"] = response.result.total;
    out["hits"] = json::array();
    for (const auto& h : response.result.hits) out["hits"].push_back(hit_to_json(h));
    if (req.contains("aggs")) {
      out["aggregations"] = json::object();
      for (std::size_t i = 0; i < aggs.size(); ++i) out["aggregations"][agg_names[i]] = result_to_json(response.aggregations[i]);
    }
    return ok(out);
  });
}

Response QueryService::metrics() const {
  return guarded([&] {
    auto read = [this](const std::atomic<std::uint64_t> stream::PipelineMetrics::*field) -> std::uint64_t {
      return metrics_ ? (metrics_->*field).load() : 0;
    };
    std::uint64_t docs = 0;
    for (const auto& name : store_.names()) docs += store_.get(name)->doc_count();
    return ok({
        {"records_produced", read(&stream::PipelineMetrics::records_produced)},
        {"records_consumed", read(&stream::PipelineMetrics::records_consumed)},
        {"dead_letter", read(&stream::PipelineMetrics::dead_letter)},
        {"late_dropped", read(&stream::PipelineMetrics::late_dropped)},
        {"batches_processed", read(&stream::PipelineMetrics::batches_processed)},
        {"last_batch_latency_ms", read(&stream::PipelineMetrics::last_batch_latency_ms)},
        {"index_doc_count", docs},
    });
  });
}

Response QueryService::delay_summary(std::optional<std::string_view> dataset) const {
  const std::string id(dataset.value_or(options_.default_dataset));
  auto body = datasets_ ? datasets_->get(id) : std::nullopt;
  if (!body) return api_error(404, "not_found", "no dataset '" + id + "' is loaded");
  return {200, std::move(*body)};
}

void mount_routes(httplib::Server& server, const QueryService& service) {
  auto param = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  };
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, kJson);
  };

  server.Get("/api/flights/live", [=, &service](const httplib::Request& req, httplib::Response& res) {
    const auto bbox = param(req, "bbox");
    const auto status = param(req, "status");
    const auto airline = param(req, "airline");
    auto view = [](const std::optional<std::string>& s) {
      return s && !s->empty() ? std::optional<std::string_view>(*s) : std::nullopt;
    };
    send(res, service.live_flights(view(bbox), view(status), view(airline)));
  });
  server.Post("/api/search", [=, &service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.search(req.body));
  });
  server.Get("/api/metrics", [=, &service](const httplib::Request&, httplib::Response& res) {
    send(res, service.metrics());
  });
  server.Get("/api/delays/summary", [=, &service](const httplib::Request& req, httplib::Response& res) {
    const auto dataset = param(req, "dataset");
    send(res, service.delay_summary(dataset ? std::optional<std::string_view>(*dataset) : std::nullopt));
  });

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const auto err = api_error(res.status, code_for_status(res.status),
                               res.status == 404 ? "no route for " + req.method + " " + req.path
                                                 : std::string(httplib::status_message(res.status)));
    res.set_content(err.body, kJson);
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unhandled error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    const auto err = api_error(500, "internal", what);
    res.status = 500;
    res.set_content(err.body, kJson);
  });

  if (service.options().cors) {
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }
}

}  // namespace skystream::service
