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

// Acceptance suite: one PASS/FAIL line per primary criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "index_oracle.hpp"
#include "skystream/cli/commands.hpp"
#include "skystream/histbatch/summary.hpp"
#include "skystream/index/index.hpp"
#include "skystream/log/commit_log.hpp"
#include "skystream/log/frame.hpp"
#include "skystream/sim/fleet.hpp"
#include "skystream/stream/pipeline.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace skystream;
using Clock = std::chrono::steady_clock;
using nlohmann::json;
using skystream::testing::TempDir;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass{false};
  std::string detail;
};

int g_failures = 0;

void report(const std::string& name, const Outcome& o) {
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  if (!o.pass) ++g_failures;
}

template <typename F>
void run_criterion(const std::string& name, F&& f) {
  try {
    report(name, f());
  } catch (const std::exception& e) {
    report(name, {false, std::string("exception: ") + e.what()});
  }
}

// ---------------------------------------------------------------------------

Outcome exactly_once() {
  TempDir dir;
  auto cfg = cli::resolve_config(nullptr, {}, {{"data_dir", dir.path().string()}}).config;
  cfg.sim.seed = 42;
  cfg.sim.flight_count = 500;
  cfg.sim_duration_seconds = 3600;

  // Oracle: distinct (flight_icao, updated) pairs straight from the simulator.
  const auto fleet = sim::generate_fleet(cfg.sim, sim::embedded_airports());
  std::unordered_set<std::string> pairs;
  for (auto t = cfg.sim.start_time.seconds; t < cfg.sim.start_time.seconds + cfg.sim_duration_seconds;
       t += cfg.sim.tick_seconds) {
    for (const auto& p : sim::tick(fleet, EventTime{t})) pairs.insert(p.flight_icao + ":" + std::to_string(t));
  }

  index::IndexStore clean_store;
  stream::PipelineMetrics m1;
  auto t0 = Clock::now();
  const auto clean = cli::run_demo(cfg, {}, clean_store, m1);
  const double clean_s = seconds_since(t0);

  index::IndexStore crash_store;
  stream::PipelineMetrics m2;
  cli::DemoOptions crash_opts;
  crash_opts.crash_after_batch = 5;
  t0 = Clock::now();
  const auto crashed = cli::run_demo(cfg, crash_opts, crash_store, m2);
  const double crash_s = seconds_since(t0);

  bool identical = true;
  for (const auto& name : {cfg.indexes.positions, cfg.indexes.windows}) {
    identical = identical && cli::index_contents(*crash_store.get(name)) == cli::index_contents(*clean_store.get(name));
  }
  std::ostringstream d;
  d << "produced=" << clean.produced << " oracle_pairs=" << pairs.size() << " indexed=" << clean.indexed_positions
    << " crash_indexed=" << crashed.indexed_positions << " crashes=" << crashed.crashes
    << " identical=" << (identical ? "true" : "false") << " run_s=" << clean_s << " crash_run_s=" << crash_s;
  const bool pass = clean.indexed_positions == pairs.size() && crashed.indexed_positions == pairs.size() &&
                    crashed.crashes == 1 && identical && clean_s < 60.0 && crash_s < 60.0;
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Outcome broker_integrity() {
  const auto t0 = Clock::now();
  TempDir dir;
  constexpr int kPartitions = 4;
  constexpr int kRecords = 100'000;
  std::vector<std::int64_t> expected(kPartitions, 0);
  {
    log::CommitLog log(dir.path(), {log::FlushPolicy::Mode::kEveryN, 256});
    log.create_topic({"t", kPartitions, 1, {}, 4096});
    log::Producer producer(log);
    std::mt19937_64 keys(99);
    for (int i = 0; i < kRecords; ++i) {
      const auto key = "N" + std::to_string(keys() % 20'000) + "-" + std::to_string(i % 7);
      producer.produce("t", key, "v" + std::to_string(i), EventTime{1'700'000'000 + i / 100});
      ++expected[fnv1a(key) % kPartitions];
    }
    log.flush();
  }

  log::CommitLog log(dir.path());
  log.recover("t");
  bool dense = true;
  std::set<std::string> values;
  std::vector<std::int64_t> counts(kPartitions, 0);
  std::size_t segments = 0;
  for (int p = 0; p < kPartitions; ++p) {
    std::int64_t next = 0;
    for (;;) {
      const auto batch = log.fetch("t", p, next, 10'000);
      if (batch.empty()) break;
      for (const auto& r : batch) {
        dense = dense && r.offset == next;
        ++next;
        values.insert(r.value);
      }
    }
    counts[p] = next;
    segments += log.topic("t").segments(p).size();
  }

  // Truncate the last frame of partition 0 at a random interior byte.
  const auto segs = log.topic("t").segments(0);
  const auto last = segs.back();
  const auto path = dir.path() / "t" / "0" / (std::to_string(last.base_offset) + ".seg");
  const auto hw_before = log.topic("t").high_watermark(0);
  const auto tail = log.fetch("t", 0, hw_before - 1, 1);
  const auto& last_rec = tail.at(0);
  const auto frame_bytes = log::frame_size(
      last_rec.key ? std::optional<std::string_view>(*last_rec.key) : std::nullopt, last_rec.value);
  std::mt19937_64 rng(1);
  const auto cut = 1 + rng() % (frame_bytes - 1);
  fs::resize_file(path, fs::file_size(path) - cut);
  log::CommitLog reopened(dir.path());
  const auto hw_after = reopened.recover("t").at(0);
  const auto survivor = reopened.fetch("t", 0, hw_after - 1, 1);
  const bool recovered = hw_after == hw_before - 1 && survivor.size() == 1 && survivor[0].offset == hw_before - 2 &&
                         fs::file_size(path) + frame_bytes == static_cast<std::uintmax_t>(last.size_bytes);

  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "records=" << values.size() << " counts=[" << counts[0] << "," << counts[1] << "," << counts[2] << ","
    << counts[3] << "] oracle=[" << expected[0] << "," << expected[1] << "," << expected[2] << "," << expected[3]
    << "] segments=" << segments << " dense=" << (dense ? "true" : "false") << " truncate_bytes=" << cut
    << " hw " << hw_before << "->" << hw_after << " seconds=" << secs;
  const bool pass = values.size() == kRecords && dense && counts == expected && recovered && segments > 4 && secs < 30;
  return {pass, d.str()};
}

// ---------------------------------------------------------------------------

struct StreamRun {
  std::vector<stream::WindowSnapshot> windows;
  std::uint64_t fetched{0};
  std::uint64_t late{0};
  std::uint64_t dead{0};
};

StreamRun run_simulated_clock(const fs::path& log_dir, int interval, std::int64_t start, std::int64_t end) {
  log::CommitLog log(log_dir);
  index::IndexStore store;
  stream::IndexStoreSink sink(store);
  stream::PipelineMetrics metrics;
  stream::PipelineOptions opts;
  opts.stream.batch_interval_seconds = interval;
  opts.stream.window_seconds = 60;
  opts.stream.allowed_lateness_seconds = 30;
  opts.stream.group_id = "acceptance-" + std::to_string(interval);
  stream::Pipeline pipeline(log, sink, opts, &metrics);
  StreamRun run;
  for (std::int64_t k = 1;; ++k) {
    const EventTime until{start + k * interval - 1};
    auto out = pipeline.step(until, until);
    run.windows.insert(run.windows.end(), out.closed.begin(), out.closed.end());
    if (out.capped) --k;
    if (until.seconds >= end && pipeline.consumer().caught_up()) break;
  }
  auto tail = pipeline.finish();
  run.windows.insert(run.windows.end(), tail.begin(), tail.end());
  run.fetched = metrics.records_consumed;
  run.late = metrics.late_dropped;
  run.dead = metrics.dead_letter;
  return run;
}

Outcome stream_correctness() {
  TempDir dir;
  constexpr std::int64_t kStart = 1'700'000'000;
  std::mt19937_64 rng(2024);
  std::int64_t last_log_ts = kStart;
  {
    log::CommitLog log(dir.path());
    log.create_topic({"flight-positions", 4});
    log::Producer producer(log);
    for (int i = 0; i < 1000; ++i) {
      const auto log_ts = kStart + i / 4;
      last_log_ts = log_ts;
      const auto icao = "F" + std::to_string(rng() % 60);
      if (rng() % 50 == 0) {
        producer.produce("flight-positions", icao, "{\"flight_icao\": 7}", EventTime{log_ts});
        continue;
      }
      // Mostly small skew; about one in eight arrives far behind.
      const auto skew = rng() % 8 == 0 ? 40 + static_cast<std::int64_t>(rng() % 80) : static_cast<std::int64_t>(rng() % 10);
      auto p = skystream::testing::make_position(icao, log_ts - skew, 40, -74, "UAL", FlightStatus::kEnRoute,
                                                 static_cast<double>(rng() % 900));
      producer.produce("flight-positions", icao, stream::encode_position(p), EventTime{log_ts});
    }
    log.flush();
  }

  // Oracle: canonical order rebuilt from the raw log, then brute-force grouping
  // with lateness judged against the running maximum event time.
  struct Raw {
    std::int64_t log_ts;
    int partition;
    std::int64_t offset;
    std::string value;
  };
  std::vector<Raw> raw;
  {
    log::CommitLog log(dir.path());
    for (int p = 0; p < 4; ++p) {
      for (const auto& r : log.fetch("flight-positions", p, 0, 100'000)) {
        raw.push_back({r.timestamp.seconds, p, r.offset, r.value});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
    return std::tie(a.log_ts, a.partition, a.offset) < std::tie(b.log_ts, b.partition, b.offset);
  });
  std::map<std::int64_t, std::uint64_t> oracle_counts;
  std::optional<std::int64_t> max_seen;
  std::uint64_t oracle_late = 0, oracle_dead = 0;
  for (const auto& r : raw) {
    FlightPosition p;
    try {
      p = stream::decode_position(r.value);
    } catch (const std::exception&) {
      ++oracle_dead;
      continue;
    }
    const auto t = p.updated.seconds;
    if (max_seen && t < *max_seen - 30) {
      ++oracle_late;
    } else {
      ++oracle_counts[t - ((t % 60) + 60) % 60];
    }
    max_seen = max_seen ? std::max(*max_seen, t) : t;
  }

  const auto one = run_simulated_clock(dir.path(), 1, kStart, last_log_ts);
  const auto five = run_simulated_clock(dir.path(), 5, kStart, last_log_ts);

  std::map<std::int64_t, std::uint64_t> got_counts;
  std::uint64_t in_windows = 0;
  for (const auto& w : one.windows) {
    got_counts[w.window_start.seconds] += w.flight_count;
    in_windows += w.flight_count;
  }
  const bool counts_ok = got_counts == oracle_counts;
  const bool conserved = in_windows + one.late + one.dead == one.fetched && one.fetched == raw.size();
  const bool invariant = one.windows == five.windows && one.late == five.late;
  std::ostringstream d;
  d << "fetched=" << one.fetched << " in_windows=" << in_windows << " late=" << one.late << " (oracle " << oracle_late
    << ") dead=" << one.dead << " (oracle " << oracle_dead << ") windows=" << one.windows.size()
    << " oracle_match=" << counts_ok << " conserved=" << conserved << " interval_invariant=" << invariant;
  return {counts_ok && conserved && invariant && one.late == oracle_late && one.dead == oracle_dead && one.late > 0,
          d.str()};
}

// ---------------------------------------------------------------------------

Outcome index_oracle() {
  const auto corpus = skystream::testing::make_corpus(11'200, 4242);
  index::Index idx({"acceptance"});
  for (const auto& [id, doc] : corpus.writes) idx.upsert(id, doc);

  std::mt19937_64 rng(31337);
  int query_mismatch = 0, agg_mismatch = 0;
  const auto kinds = skystream::testing::all_aggregation_kinds();
  for (int i = 0; i < 200; ++i) {
    const auto q = skystream::testing::random_query(rng);
    const auto expected = skystream::testing::naive_search(corpus, q);
    const auto got = idx.search(q, corpus.docs.size());
    std::vector<std::string> ids;
    for (const auto& h : got.hits) ids.push_back(h.doc_id);
    if (got.total != expected.size() || ids != expected) ++query_mismatch;
    for (const auto& agg : kinds) {
      if (idx.aggregate(q, agg) != skystream::testing::naive_aggregate(corpus, expected, agg)) ++agg_mismatch;
    }
  }

  std::vector<double> ms;
  for (int i = 0; i < 201; ++i) {
    const auto& airline = skystream::testing::kAirlines()[static_cast<std::size_t>(i) % skystream::testing::kAirlines().size()];
    const auto t0 = Clock::now();
    const auto r = idx.search({index::TermQuery{"airline", airline}}, 10);
    ms.push_back(seconds_since(t0) * 1000.0);
    if (r.total == 0) ++query_mismatch;
  }
  const double p50 = cli::percentile(ms, 50);
  std::ostringstream d;
  d << "docs=" << idx.doc_count() << " queries=200 query_mismatch=" << query_mismatch
    << " agg_mismatch=" << agg_mismatch << " term_p50_ms=" << p50;
  return {idx.doc_count() >= 10'000 && query_mismatch == 0 && agg_mismatch == 0 && p50 < 50.0, d.str()};
}

// ---------------------------------------------------------------------------

Outcome historical() {
  using namespace skystream::histbatch;
  const auto parsed = parse_bts_csv(skystream::testing::fixture("bts_synthetic_10k.csv"));
  const auto s = summarize(parsed.records);
  const auto got = json::parse(summary_to_json(s));
  const auto golden = json::parse(skystream::testing::read_file(skystream::testing::fixture("bts_synthetic_10k.summary.json")));
  int differing = 0;
  for (const auto& [k, v] : golden.items()) differing += got.contains(k) && got.at(k) == v ? 0 : 1;
  differing += static_cast<int>(got.size() != golden.size());
  const auto sum = s.on_time_pct_hundredths + s.delayed_pct_hundredths;
  std::ostringstream d;
  d << "rows=" << parsed.rows << " rejected=" << parsed.rejected << " total=" << s.total_flights
    << " on_time_pct=" << s.on_time_pct() << " delayed_pct=" << s.delayed_pct() << " differing_fields=" << differing
    << " pct_sum_hundredths=" << sum;
  return {differing == 0 && sum == 10000, d.str()};
}

void historical_reference() {
  const char* path = std::getenv("SKYSTREAM_BTS_DEC2023");
  if (!path || !fs::exists(path)) {
    std::cout << "SKIP historical_reference: set SKYSTREAM_BTS_DEC2023 to the December 2023 BTS CSV to check "
                 "570394 flights, 83.43/16.57 +-0.01"
              << std::endl;
    return;
  }
  run_criterion("historical_reference", [&] {
    const auto s = histbatch::summarize(histbatch::parse_bts_csv(path).records);
    std::ostringstream d;
    d << "total=" << s.total_flights << " on_time_pct=" << s.on_time_pct() << " delayed_pct=" << s.delayed_pct();
    return Outcome{cli::matches_reference(s), d.str()};
  });
}

// ---------------------------------------------------------------------------

Outcome sustained_throughput() {
  TempDir dir;
  const auto cfg = cli::resolve_config(nullptr, {}, {{"data_dir", dir.path().string()}}).config;
  cli::SustainOptions opts;
  opts.seconds = 30;
  const auto r = cli::run_sustain(cfg, opts);
  std::ostringstream d;
  d << "seconds=" << r.seconds << " produced=" << r.produced << " indexed=" << r.indexed
    << " throughput_rps=" << r.throughput_rps << " p99_batch_ms=" << r.p99_batch_ms
    << " batch_interval_ms=" << r.batch_interval_ms;
  return {r.pass() && r.indexed == r.produced, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only(argv + 1, argv + argc);
  auto wanted = [&](const std::string& n) { return only.empty() || only.contains(n); };
  if (wanted("exactly_once")) run_criterion("exactly_once", exactly_once);
  if (wanted("broker_integrity")) run_criterion("broker_integrity", broker_integrity);
  if (wanted("stream_correctness")) run_criterion("stream_correctness", stream_correctness);
  if (wanted("index_oracle")) run_criterion("index_oracle", index_oracle);
  if (wanted("historical")) {
    run_criterion("historical", historical);
    historical_reference();
  }
  if (wanted("sustained_throughput")) run_criterion("sustained_throughput", sustained_throughput);
  std::cout << (g_failures == 0 ? "ALL PASS" : std::to_string(g_failures) + " FAILED") << std::endl;
  return g_failures == 0 ? 0 : 1;
}
