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

#include <random>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "index_oracle.hpp"
#include "skystream/service/query_json.hpp"
#include "skystream/service/query_service.hpp"
#include "test_support.hpp"

namespace skystream::service {
namespace {

using nlohmann::json;
using skystream::testing::make_position;

void index_positions(index::IndexStore& store, const std::vector<FlightPosition>& ps) {
  stream::MicroBatch b;
  for (const auto& p : ps) b.records.push_back({0, 0, p.updated, p});
  stream::IndexStoreSink sink(store);
  sink.apply(stream::to_index_actions(b, {}));
}

json body_of(const Response& r) { return json::parse(r.body); }

void expect_error(const Response& r, int status, const std::string& code) {
  EXPECT_EQ(r.status, status) << r.body;
  const auto j = body_of(r);
  EXPECT_EQ(j.at("status"), status);
  EXPECT_EQ(j.at("code"), code);
  EXPECT_TRUE(j.at("message").is_string());
  EXPECT_EQ(j.size(), 3u);
}

TEST(ParseBBox, ValidAndInvalid) {
  const auto q = QueryService::parse_bbox("50,-130,20,-60");
  EXPECT_EQ(q.top_left, (GeoPoint{50, -130}));
  EXPECT_EQ(q.bottom_right, (GeoPoint{20, -60}));
  EXPECT_THROW(QueryService::parse_bbox("50,-130,20"), BadRequest);
  EXPECT_THROW(QueryService::parse_bbox("50,-130,20,-60,1"), BadRequest);
  EXPECT_THROW(QueryService::parse_bbox("a,b,c,d"), BadRequest);
  EXPECT_THROW(QueryService::parse_bbox("10,0,20,5"), BadRequest);  // top below bottom
}

TEST(LiveFlights, LatestVersionPerFlightThenFilters) {
  index::IndexStore store;
  QueryService svc(store, nullptr, nullptr);
  auto empty = body_of(svc.live_flights(std::nullopt, std::nullopt, std::nullopt));
  EXPECT_EQ(empty, (json{{"as_of", 0}, {"flights", json::array()}, {"total", 0}}));

  index_positions(store, {make_position("UAL1", 100, 40, -74), make_position("UAL1", 200, 10, 10),
                          make_position("DAL2", 150, 41, -75, "DAL", FlightStatus::kLanded),
                          make_position("AAL3", 120, 34, -118, "AAL")});
  const auto all = body_of(svc.live_flights(std::nullopt, std::nullopt, std::nullopt));
  EXPECT_EQ(all.at("total"), 3);
  EXPECT_EQ(all.at("as_of"), 200);
  for (const auto& f : all.at("flights")) {
    if (f.at("flight_icao") == "UAL1") EXPECT_EQ(f.at("updated"), 200);
  }
  // UAL1's latest position is outside the box, so its older in-box position must not appear.
  const auto boxed = body_of(svc.live_flights("45,-80,35,-70", std::nullopt, std::nullopt));
  ASSERT_EQ(boxed.at("total"), 1);
  EXPECT_EQ(boxed.at("flights")[0].at("flight_icao"), "DAL2");
  EXPECT_EQ(body_of(svc.live_flights(std::nullopt, "landed", std::nullopt)).at("total"), 1);
  EXPECT_EQ(body_of(svc.live_flights(std::nullopt, std::nullopt, "aal")).at("total"), 1);
  expect_error(svc.live_flights("1,2,3", std::nullopt, std::nullopt), 400, "bad_request");
  expect_error(svc.live_flights(std::nullopt, "taxiing", std::nullopt), 400, "bad_request");
}

TEST(LiveFlights, BBoxMatchesBruteForce) {
  index::IndexStore store;
  QueryService svc(store, nullptr, nullptr);
  std::mt19937_64 rng(4);
  std::vector<FlightPosition> ps;
  for (int i = 0; i < 400; ++i) {
    ps.push_back(make_position("F" + std::to_string(i), 1000 + i, static_cast<double>(rng() % 1600) / 10 - 80,
                               static_cast<double>(rng() % 3600) / 10 - 180));
  }
  index_positions(store, ps);
  for (int t = 0; t < 50; ++t) {
    const double top = static_cast<double>(rng() % 160) - 80;
    const double bottom = std::max(-90.0, top - static_cast<double>(rng() % 60));
    const double left = static_cast<double>(rng() % 360) - 180;
    const double right = static_cast<double>(rng() % 360) - 180;
    std::size_t expected = 0;
    for (const auto& p : ps) {
      const bool lat_ok = p.location.lat <= top && p.location.lat >= bottom;
      const bool lng_ok = left <= right ? (p.location.lng >= left && p.location.lng <= right)
                                        : (p.location.lng >= left || p.location.lng <= right);
      expected += lat_ok && lng_ok;
    }
    const auto bbox = json(top).dump() + "," + json(left).dump() + "," + json(bottom).dump() + "," +
                      json(right).dump();
    EXPECT_EQ(body_of(svc.live_flights(bbox, std::nullopt, std::nullopt)).at("total"), expected) << bbox;
  }
}

TEST(Search, EmptyIndexHasZeroTotal) {
  index::IndexStore store;
  QueryService svc(store, nullptr, nullptr);
  const auto r = svc.search(R"({"query": {"match_all": {}}})");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(body_of(r), json::parse(R"({"total": 0, "hits": []})"));
}

TEST(Search, SameResultsAsDirectIndexCalls) {
  index::IndexStore store;
  QueryService svc(store, nullptr, nullptr);
  const auto corpus = skystream::testing::make_corpus(1500, 3);
  auto idx = store.get("flights");
  for (const auto& [id, doc] : corpus.writes) idx->upsert(id, doc);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto q = skystream::testing::random_query(rng);
    json req{{"query", query_to_json(q)}, {"size", 50}, {"sort", {{"field", "speed"}, {"order", "desc"}}}};
    json aggs = json::object();
    const auto kinds = skystream::testing::all_aggregation_kinds();
    for (std::size_t k = 0; k < kinds.size(); ++k) aggs["a" + std::to_string(k)] = aggregation_to_json(kinds[k]);
    req["aggs"] = aggs;
    const auto r = svc.search(req.dump());
    ASSERT_EQ(r.status, 200) << r.body;
    const auto got = body_of(r);
    const auto direct = idx->query(q, 50, index::SortSpec{"speed", index::SortOrder::kDesc}, kinds);
    EXPECT_EQ(got.at("total"), direct.result.total);
    ASSERT_EQ(got.at("hits").size(), direct.result.hits.size());
    for (std::size_t h = 0; h < direct.result.hits.size(); ++h) {
      EXPECT_EQ(got.at("hits")[h], hit_to_json(direct.result.hits[h]));
    }
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      EXPECT_EQ(got.at("aggregations").at("a" + std::to_string(k)), result_to_json(direct.aggregations[k]));
    }
  }
}

TEST(Search, QueryJsonRoundTrip) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const auto q = skystream::testing::random_query(rng);
    const auto j = query_to_json(q);
    EXPECT_EQ(query_to_json(query_from_json(j)), j);
  }
}

TEST(Search, MalformedRequestsAre400) {
  index::IndexStore store;
  QueryService svc(store, nullptr, nullptr);
  expect_error(svc.search("{not json"), 400, "bad_request");
  expect_error(svc.search("[]"), 400, "bad_request");
  expect_error(svc.search(R"({"query": {"fuzzy": {}}})"), 400, "bad_request");
  expect_error(svc.search(R"({"query": {"match_all": {}}, "extra": 1})"), 400, "bad_request");
  expect_error(svc.search(R"({"size": -1})"), 400, "bad_request");
  expect_error(svc.search(R"({"sort": {"field": "x", "order": "up"}})"), 400, "bad_request");
  expect_error(
      svc.search(R"({"query": {"geo_bbox": {"location": {"top_left": {"lat": 0, "lng": 0},
                                                          "bottom_right": {"lat": 10, "lng": 10}}}}})"),
      400, "bad_request");
  expect_error(svc.search(R"({"aggs": {"a": {"terms": {"field": "x", "top_k": 0}}}})"), 400, "bad_request");
  expect_error(svc.search(R"({"index": "nope"})"), 404, "not_found");
}

TEST(Search, TypeMismatchIs409) {
  index::IndexStore store;
  QueryService svc(store, nullptr, nullptr);
  store.get("flights")->upsert("a", {{"status", std::string("x")}});
  expect_error(svc.search(R"({"aggs": {"s": {"stats": {"field": "status"}}}})"), 409, "mapping_conflict");
}

TEST(Metrics, StartAtZeroAndTrackCounters) {
  index::IndexStore store;
  stream::PipelineMetrics m;
  QueryService svc(store, &m, nullptr);
  const auto zero = body_of(svc.metrics());
  for (const auto& key : {"records_produced", "records_consumed", "dead_letter", "late_dropped", "batches_processed",
                          "last_batch_latency_ms", "index_doc_count"}) {
    EXPECT_EQ(zero.at(key), 0) << key;
  }
  m.records_consumed = 7;
  index_positions(store, {make_position("A", 1)});
  const auto after = body_of(svc.metrics());
  EXPECT_EQ(after.at("records_consumed"), 7);
  EXPECT_EQ(after.at("index_doc_count"), 1);
  EXPECT_EQ(body_of(QueryService(store, nullptr, nullptr).metrics()).at("records_consumed"), 0);
}

TEST(DelaySummary, NotFoundAndVerbatimPassthrough) {
  index::IndexStore store;
  DatasetRegistry datasets;
  QueryService svc(store, nullptr, &datasets);
  expect_error(svc.delay_summary(std::nullopt), 404, "not_found");
  const std::string doc = "{\n  \"total_flights\": 3\n}\n";
  datasets.put("default", doc);
  datasets.put("dec", "{}\n");
  EXPECT_EQ(svc.delay_summary(std::nullopt).body, doc);
  EXPECT_EQ(svc.delay_summary("dec").body, "{}\n");
  expect_error(svc.delay_summary("jan"), 404, "not_found");
}

// ---------------------------------------------------------------------------
// HTTP

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<QueryService>(store_, &metrics_, &datasets_);
    mount_routes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }
  void TearDown() override {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  index::IndexStore store_;
  stream::PipelineMetrics metrics_;
  DatasetRegistry datasets_;
  std::unique_ptr<QueryService> service_;
  httplib::Server server_;
  int port_{0};
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpApi, EndpointsServeJson) {
  index_positions(store_, {make_position("UAL1", 100, 40, -74)});
  datasets_.put("default", "{\"x\": 1}\n");

  auto live = client_->Get("/api/flights/live?bbox=45,-80,35,-70&status=en-route");
  ASSERT_TRUE(live);
  EXPECT_EQ(live->status, 200);
  EXPECT_EQ(live->get_header_value("Content-Type"), "application/json");
  EXPECT_EQ(live->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(json::parse(live->body).at("total"), 1);

  auto search = client_->Post("/api/search", R"({"query": {"term": {"flight_icao": "ual1"}}})", "application/json");
  ASSERT_TRUE(search);
  EXPECT_EQ(search->status, 200);
  EXPECT_EQ(json::parse(search->body).at("total"), 1);

  auto metrics = client_->Get("/api/metrics");
  ASSERT_TRUE(metrics);
  EXPECT_EQ(json::parse(metrics->body).at("index_doc_count"), 1);

  auto summary = client_->Get("/api/delays/summary");
  ASSERT_TRUE(summary);
  EXPECT_EQ(summary->body, "{\"x\": 1}\n");
}

TEST_F(HttpApi, ErrorsUseCommonShape) {
  auto bad = client_->Post("/api/search", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body).at("code"), "bad_request");

  auto missing = client_->Get("/api/nope");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body).at("code"), "not_found");

  auto no_data = client_->Get("/api/delays/summary?dataset=zzz");
  ASSERT_TRUE(no_data);
  EXPECT_EQ(no_data->status, 404);

  auto preflight = client_->Options("/api/search");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_EQ(preflight->get_header_value("Access-Control-Allow-Methods"), "GET, POST, OPTIONS");
}

}  // namespace
}  // namespace skystream::service
