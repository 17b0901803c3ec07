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
#include <string>

#include <benchmark/benchmark.h>

#include "skystream/index/geohash.hpp"
#include "skystream/index/index.hpp"

namespace {

using namespace skystream;

const char* kAirlines[] = {"UAL", "DAL", "AAL", "SWA", "JBU", "ASA", "NKS", "FFT"};

index::Document random_doc(std::mt19937_64& rng) {
  index::Document d;
  d["airline"] = std::string(kAirlines[rng() % 8]);
  d["status"] = std::string(rng() % 3 == 0 ? "landed" : "en-route");
  d["speed"] = static_cast<double>(rng() % 1000);
  d["updated"] = EventTime{1'700'000'000 + static_cast<std::int64_t>(rng() % 7200)};
  d["location"] = GeoPoint{static_cast<double>(rng() % 1600) / 10 - 80, static_cast<double>(rng() % 3600) / 10 - 180};
  return d;
}

index::Index& corpus(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<index::Index>> cache;
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<index::Index>(index::IndexConfig{"bench"});
    std::mt19937_64 rng(1);
    for (std::size_t i = 0; i < n; ++i) slot->upsert("d" + std::to_string(i), random_doc(rng));
  }
  return *slot;
}

void BM_Upsert(benchmark::State& state) {
  index::Index idx({"bench"});
  std::mt19937_64 rng(2);
  std::uint64_t i = 0;
  for (auto _ : state) idx.upsert("d" + std::to_string(i++ % 20'000), random_doc(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Upsert);

void BM_TermQuery(benchmark::State& state) {
  auto& idx = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(idx.search({index::TermQuery{"airline", std::string("ual")}}));
}
BENCHMARK(BM_TermQuery)->Arg(10'000)->Arg(100'000);

void BM_BoolRangeGeo(benchmark::State& state) {
  auto& idx = corpus(static_cast<std::size_t>(state.range(0)));
  index::BoolQuery b;
  b.must.push_back({index::RangeQuery{"speed", 200.0, 800.0}});
  b.must.push_back({index::GeoBBoxQuery{"location", {50, -130}, {20, -60}}});
  b.must_not.push_back({index::TermQuery{"status", std::string("landed")}});
  const index::Query q{b};
  for (auto _ : state) benchmark::DoNotOptimize(idx.search(q, 50, index::SortSpec{"speed", index::SortOrder::kDesc}));
}
BENCHMARK(BM_BoolRangeGeo)->Arg(10'000)->Arg(100'000);

void BM_Aggregations(benchmark::State& state) {
  auto& idx = corpus(10'000);
  const std::vector<index::Aggregation> aggs{index::TermsAgg{"airline", 5}, index::DateHistogramAgg{"updated", 300},
                                             index::StatsAgg{"speed"}, index::GeohashGridAgg{"location", 3}};
  for (auto _ : state) benchmark::DoNotOptimize(idx.query(index::match_all(), 0, std::nullopt, aggs));
}
BENCHMARK(BM_Aggregations);

void BM_GeohashEncode(benchmark::State& state) {
  double lat = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(index::geohash_encode({lat, -74.0}, 12));
    lat = lat > 80 ? -80 : lat + 0.37;
  }
}
BENCHMARK(BM_GeohashEncode);

}  // namespace

BENCHMARK_MAIN();
