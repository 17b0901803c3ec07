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

#include "skystream/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>

#include "skystream/histbatch/bts.hpp"
#include "skystream/service/query_json.hpp"
#include "skystream/service/query_service.hpp"
#include "skystream/sim/api_adapter.hpp"
#include "skystream/sim/fleet.hpp"
#include "skystream/stream/micro_batch.hpp"

namespace skystream::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double to_ms(std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); }

log::FlushPolicy flush_policy(const RunConfig& config) {
  log::FlushPolicy p;
  if (config.flush_every_n > 1) {
    p.mode = log::FlushPolicy::Mode::kEveryN;
    p.every_n = config.flush_every_n;
  }
  return p;
}

void load_datasets(const RunConfig& config, service::DatasetRegistry& registry) {
  if (!fs::is_directory(config.dataset_dir())) return;
  for (const auto& entry : fs::directory_iterator(config.dataset_dir())) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    registry.put(entry.path().stem().string(), buf.str());
  }
}

// Blocks until `stop`; returns kExitNetwork when the port cannot be bound.
int serve_until_stopped(const RunConfig& config, const service::QueryService& svc, Logger& logger,
                        std::stop_token stop) {
  httplib::Server server;
  service::mount_routes(server, svc);
  int port = config.api_port;
  if (port == 0) {
    port = server.bind_to_any_port(config.api_host);
  } else if (!server.bind_to_port(config.api_host, port)) {
    port = -1;
  }
  if (port < 0) {
    logger.error("bind_failed", {{"host", config.api_host}, {"port", config.api_port}});
    return kExitNetwork;
  }
  std::thread listener([&server] { server.listen_after_bind(); });
  logger.info("serving", {{"url", "http://" + config.api_host + ":" + std::to_string(port)}});
  while (!stop.stop_requested()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  listener.join();
  logger.info("server_stopped");
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const stream::StreamConfigError*>(&e) ||
      dynamic_cast<const sim::InvalidSimConfig*>(&e) || dynamic_cast<const sim::AirportTableError*>(&e) ||
      dynamic_cast<const sim::InsufficientAirports*>(&e)) {
    return kExitConfig;
  }
  if (const auto* le = dynamic_cast<const log::LogError*>(&e)) {
    return le->code() == log::LogErrc::kInvalidConfig ? kExitConfig : kExitStorage;
  }
  if (const auto* ie = dynamic_cast<const index::IndexError*>(&e)) {
    switch (ie->code()) {
      case index::IndexErrc::kInvalidConfig: return kExitConfig;
      case index::IndexErrc::kIo:
      case index::IndexErrc::kCorruptSnapshot: return kExitStorage;
      default: return kExitFailure;
    }
  }
  if (const auto* he = dynamic_cast<const histbatch::HistError*>(&e)) {
    return he->code() == histbatch::HistErrc::kIo ? kExitStorage : kExitFailure;
  }
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitStorage;
  if (dynamic_cast<const sim::ApiUnavailable*>(&e) || dynamic_cast<const NetworkError*>(&e)) return kExitNetwork;
  return kExitFailure;
}

std::unique_ptr<log::CommitLog> open_log(const RunConfig& config, const fs::path& dir) {
  return std::make_unique<log::CommitLog>(dir, flush_policy(config));
}

log::Topic& ensure_topic(log::CommitLog& log, const RunConfig& config) {
  if (!log.has_topic(config.topic.name)) return log.create_topic(config.topic);
  auto& t = log.topic(config.topic.name);
  if (t.partition_count() != config.topic.partitions) {
    throw ConfigError("topic " + config.topic.name + " exists with " + std::to_string(t.partition_count()) +
                      " partitions, configured " + std::to_string(config.topic.partitions));
  }
  return t;
}

std::vector<sim::Airport> fleet_airports(const RunConfig& config) {
  if (config.airports_file) return sim::load_airport_table(*config.airports_file);
  return sim::embedded_airports();
}

SimulateReport run_simulate(const RunConfig& config, log::CommitLog& log, stream::PipelineMetrics* metrics,
                            std::stop_token stop) {
  const auto airports = fleet_airports(config);
  const auto fleet = sim::generate_fleet(config.sim, airports);
  log::Producer producer(log);
  SimulateReport report;
  const auto end = config.sim.start_time.seconds + config.sim_duration_seconds;
  for (auto t = config.sim.start_time.seconds; t < end; t += config.sim.tick_seconds) {
    if (stop.stop_requested()) break;
    for (const auto& p : sim::tick(fleet, EventTime{t})) {
      producer.produce(config.topic.name, p.flight_icao, stream::encode_position(p), EventTime{t});
      ++report.produced;
      if (metrics) ++metrics->records_produced;
    }
    ++report.ticks;
  }
  log.flush();
  return report;
}

std::pair<std::uint64_t, std::uint64_t> run_replay(const RunConfig& config, log::CommitLog& log,
                                                   const std::vector<fs::path>& pages,
                                                   stream::PipelineMetrics* metrics) {
  log::Producer producer(log);
  std::uint64_t produced = 0;
  std::uint64_t dead = 0;
  for (const auto& page : pages) {
    std::ifstream in(page, std::ios::binary);
    if (!in) throw fs::filesystem_error("cannot read API page", page, std::make_error_code(std::errc::io_error));
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto parsed = sim::parse_api_response(buf.str());
    dead += parsed.dead_letter;
    for (const auto& p : parsed.positions) {
      producer.produce(config.topic.name, p.flight_icao, stream::encode_position(p), p.updated);
      ++produced;
      if (metrics) ++metrics->records_produced;
    }
  }
  log.flush();
  return {produced, dead};
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(samples.size())));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

nlohmann::json index_contents(const index::Index& idx) {
  auto out = nlohmann::json::array();
  idx.scan(index::match_all(), [&out](const index::IndexedDoc& d) {
    out.push_back({{"_id", d.doc_id}, {"_source", service::document_to_json(d.fields)}});
  });
  return out;
}

DemoReport run_demo(const RunConfig& config, const DemoOptions& options, index::IndexStore& store,
                    stream::PipelineMetrics& metrics, Logger* logger) {
  const auto wall0 = Clock::now();
  const auto dir = config.data_dir / "demo";
  if (options.fresh) fs::remove_all(dir);
  auto log = open_log(config, dir / "log");
  ensure_topic(*log, config);

  DemoReport report;
  const auto sim = run_simulate(config, *log, &metrics);
  report.produced = sim.produced;
  {
    // Independent recount of the idempotence keys straight from the log.
    std::unordered_set<std::string> ids;
    const auto& topic = log->topic(config.topic.name);
    for (int p = 0; p < topic.partition_count(); ++p) {
      for (auto from = topic.log_start_offset(p); from < topic.high_watermark(p);) {
        auto frames = topic.fetch(p, from, 10'000);
        for (const auto& f : frames) {
          try {
            ids.insert(stream::position_doc_id(stream::decode_position(f.value)));
          } catch (const std::exception&) {
          }
        }
        from = frames.back().offset + 1;
      }
    }
    report.distinct_pairs = ids.size();
  }
  if (logger) logger->info("simulated", {{"produced", report.produced}, {"ticks", sim.ticks}});

  stream::IndexStoreSink sink(store);
  stream::PipelineOptions popts;
  popts.stream = config.stream;
  popts.topic = config.topic.name;
  popts.indexes = config.indexes;
  popts.crash_after_apply_batch = options.crash_after_batch;

  std::vector<double> latencies;
  const auto pipe0 = Clock::now();
  auto pipeline = std::make_unique<stream::Pipeline>(*log, sink, popts, &metrics);
  const auto start = config.sim.start_time.seconds;
  const auto end = start + config.sim_duration_seconds;
  const auto interval = config.stream.batch_interval_seconds;
  for (std::int64_t k = 1;; ++k) {
    // Batch k carries log timestamps in [start + (k-1)*interval, start + k*interval).
    const EventTime until{start + k * interval - 1};
    try {
      const auto outcome = pipeline->step(until, until);
      latencies.push_back(to_ms(outcome.latency));
      ++report.batches;
      if (outcome.capped) --k;  // same bound again until the backlog clears
    } catch (const stream::InjectedCrash& e) {
      ++report.crashes;
      if (logger) logger->warn("pipeline_crash", {{"reason", e.what()}});
      popts.crash_after_apply_batch.reset();
      pipeline = std::make_unique<stream::Pipeline>(*log, sink, popts, &metrics);
      if (logger) logger->info("pipeline_restarted", {{"rebuilt_records", pipeline->rebuilt_records()}});
      --k;
      continue;
    }
    if (until.seconds >= end - 1 && pipeline->consumer().caught_up()) break;
  }
  const auto closed = pipeline->finish();
  report.pipeline_seconds = seconds_since(pipe0);

  report.indexed_positions = store.get(config.indexes.positions)->doc_count();
  report.window_docs = store.contains(config.indexes.windows) ? store.get(config.indexes.windows)->doc_count() : 0;
  report.windows_closed = metrics.windows_closed.load();
  report.consumed = metrics.records_consumed.load();
  report.late_dropped = metrics.late_dropped.load();
  report.dead_letter = metrics.dead_letter.load();
  report.p50_batch_ms = percentile(latencies, 50);
  report.p99_batch_ms = percentile(latencies, 99);
  report.throughput_rps =
      report.pipeline_seconds > 0 ? static_cast<double>(report.consumed) / report.pipeline_seconds : 0.0;
  report.wall_seconds = seconds_since(wall0);
  return report;
}

SustainReport run_sustain(const RunConfig& config, const SustainOptions& options, Logger* logger) {
  const auto dir = config.data_dir / "sustain";
  fs::remove_all(dir);
  auto log = open_log(config, dir / "log");
  ensure_topic(*log, config);

  auto sim_cfg = config.sim;
  sim_cfg.flight_count = options.flight_count;
  const auto fleet = sim::generate_fleet(sim_cfg, fleet_airports(config));

  index::IndexStore store;
  stream::PipelineMetrics metrics;
  stream::IndexStoreSink sink(store);
  stream::PipelineOptions popts;
  popts.stream = config.stream;
  popts.topic = config.topic.name;
  popts.indexes = config.indexes;

  SustainReport report;
  report.batch_interval_ms = config.stream.batch_interval_seconds * 1000.0;
  std::vector<double> latencies;
  Clock::time_point last_commit;

  stream::Pipeline pipeline(*log, sink, popts, &metrics);
  const auto t0 = Clock::now();
  std::jthread consumer([&](std::stop_token stop) {
    pipeline.run(stop, [&](const stream::BatchOutcome& o) {
      if (o.records == 0) return;
      latencies.push_back(to_ms(o.latency));
      last_commit = Clock::now();
    });
  });

  {
    // Paced producer: starts once most of the fleet is airborne.
    log::Producer producer(*log);
    auto t = sim_cfg.start_time.seconds + sim_cfg.departure_spread_seconds;
    std::vector<FlightPosition> pending;
    std::size_t next = 0;
    const auto deadline = t0 + std::chrono::seconds(options.seconds);
    while (Clock::now() < deadline) {
      const auto allowed = static_cast<std::uint64_t>(options.target_rate * seconds_since(t0));
      if (report.produced >= allowed) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
        continue;
      }
      for (; report.produced < allowed; ++report.produced) {
        while (next == pending.size()) {
          t += sim_cfg.tick_seconds;
          pending = sim::tick(fleet, EventTime{t});
          next = 0;
        }
        const auto& p = pending[next++];
        producer.produce(config.topic.name, p.flight_icao, stream::encode_position(p), EventTime{t});
      }
      metrics.records_produced = report.produced;
    }
    log->flush();
  }

  const auto drain_deadline = Clock::now() + 3 * std::chrono::seconds(config.stream.batch_interval_seconds);
  while (metrics.records_consumed.load() < report.produced && Clock::now() < drain_deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  consumer.request_stop();
  consumer.join();

  report.indexed = store.contains(config.indexes.positions) ? store.get(config.indexes.positions)->doc_count() : 0;
  report.batches = latencies.size();
  report.seconds = std::chrono::duration<double>(last_commit - t0).count();
  report.throughput_rps = report.seconds > 0 ? static_cast<double>(report.indexed) / report.seconds : 0.0;
  report.p50_batch_ms = percentile(latencies, 50);
  report.p99_batch_ms = percentile(latencies, 99);
  if (logger) logger->info("sustain_finished", {{"produced", report.produced}, {"indexed", report.indexed}});
  return report;
}

bool matches_reference(const histbatch::DelaySummary& s) {
  // Half a hundredth of slack absorbs binary rounding of the 2-decimal values.
  constexpr double kSlack = kReferenceTolerancePct + 1e-9;
  return s.total_flights == kReferenceTotalFlights && std::abs(s.on_time_pct() - kReferenceOnTimePct) <= kSlack &&
         std::abs(s.delayed_pct() - kReferenceDelayedPct) <= kSlack;
}

AnalyzeReport run_analyze(const RunConfig& config, const AnalyzeOptions& options) {
  AnalyzeReport report;
  report.parsed = histbatch::parse_bts_csv(options.csv);
  report.summary = histbatch::summarize(report.parsed.records);
  report.written = options.out ? *options.out : config.dataset_dir() / (options.dataset_id + ".json");
  if (report.written.has_parent_path()) fs::create_directories(report.written.parent_path());
  histbatch::export_summary(report.summary, report.written);
  if (options.reference_check) report.reference_ok = matches_reference(report.summary);
  return report;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_broker_init(const RunConfig& config, Logger& logger) {
  auto log = open_log(config, config.log_dir());
  const bool existed = log->has_topic(config.topic.name);
  auto& topic = ensure_topic(*log, config);
  logger.result("broker_init", {{"topic", config.topic.name},
                                {"partitions", topic.partition_count()},
                                {"created", !existed},
                                {"data_dir", config.log_dir().string()}});
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, const std::vector<fs::path>& replay, Logger& logger) {
  auto log = open_log(config, config.log_dir());
  if (!log->has_topic(config.topic.name)) {
    throw log::LogError(log::LogErrc::kUnknownTopic,
                        "topic " + config.topic.name + " does not exist; run broker-init first");
  }
  if (!replay.empty()) {
    const auto [produced, dead] = run_replay(config, *log, replay);
    logger.result("simulate", {{"source", "replay"}, {"produced", produced}, {"dead_letter", dead}});
    return kExitOk;
  }
  const auto report = run_simulate(config, *log);
  logger.result("simulate", {{"source", "synthetic"},
                             {"seed", config.sim.seed},
                             {"ticks", report.ticks},
                             {"produced", report.produced}});
  return kExitOk;
}

int cmd_pipeline(const RunConfig& config, bool drain, Logger& logger, std::stop_token stop) {
  auto log = open_log(config, config.log_dir());
  log->topic(config.topic.name);
  index::IndexStore store;
  store.load_all(config.index_dir());
  stream::PipelineMetrics metrics;
  stream::IndexStoreSink sink(store);
  stream::PipelineOptions popts;
  popts.stream = config.stream;
  popts.topic = config.topic.name;
  popts.indexes = config.indexes;
  stream::Pipeline pipeline(*log, sink, popts, &metrics);
  logger.info("pipeline_started", {{"topic", config.topic.name},
                                   {"group", config.stream.group_id},
                                   {"rebuilt_records", pipeline.rebuilt_records()}});

  auto on_batch = [&logger](const stream::BatchOutcome& o) {
    logger.debug("batch", {{"batch_id", o.batch_id},
                           {"records", o.records},
                           {"actions", o.actions},
                           {"windows_closed", o.closed.size()},
                           {"latency_ms", to_ms(o.latency)}});
  };
  if (drain) {
    while (!stop.stop_requested()) {
      const auto now = std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch());
      const auto outcome = pipeline.step(EventTime{now.count()});
      on_batch(outcome);
      if (outcome.records == 0 && pipeline.consumer().caught_up()) break;
    }
  } else {
    pipeline.run(stop, on_batch);
  }
  store.snapshot_all(config.index_dir());
  logger.result("pipeline", {{"consumed", metrics.records_consumed.load()},
                             {"dead_letter", metrics.dead_letter.load()},
                             {"late_dropped", metrics.late_dropped.load()},
                             {"batches", metrics.batches_processed.load()},
                             {"windows_closed", metrics.windows_closed.load()},
                             {"open_windows", pipeline.open_windows()}});
  return kExitOk;
}

int cmd_serve(const RunConfig& config, Logger& logger, std::stop_token stop) {
  index::IndexStore store;
  store.load_all(config.index_dir());
  service::DatasetRegistry datasets;
  load_datasets(config, datasets);
  service::ServiceOptions sopts;
  sopts.indexes = config.indexes;
  sopts.cors = config.cors;
  service::QueryService svc(store, nullptr, &datasets, sopts);
  return serve_until_stopped(config, svc, logger, stop);
}

int cmd_analyze(const RunConfig& config, const AnalyzeOptions& options, Logger& logger) {
  const auto r = run_analyze(config, options);
  logger.result("analyze", {{"rows", r.parsed.rows},
                            {"records", r.parsed.records.size()},
                            {"rejected", r.parsed.rejected},
                            {"total_flights", r.summary.total_flights},
                            {"cancelled", r.summary.cancelled_count},
                            {"on_time_pct", r.summary.on_time_pct()},
                            {"delayed_pct", r.summary.delayed_pct()},
                            {"output", r.written.string()}});
  if (r.reference_ok) {
    logger.result("reference_check", {{"expected_total", kReferenceTotalFlights},
                                      {"expected_on_time_pct", kReferenceOnTimePct},
                                      {"expected_delayed_pct", kReferenceDelayedPct},
                                      {"tolerance_pct", kReferenceTolerancePct},
                                      {"result", *r.reference_ok ? "PASS" : "FAIL"}});
    if (!*r.reference_ok) return kExitFailure;
  }
  return kExitOk;
}

int cmd_demo(const RunConfig& config, const DemoOptions& options, bool serve,
             const std::optional<SustainOptions>& sustain, Logger& logger, std::stop_token stop) {
  if (sustain) {
    const auto r = run_sustain(config, *sustain, &logger);
    logger.result("sustain", {{"seconds", r.seconds},
                              {"produced", r.produced},
                              {"indexed", r.indexed},
                              {"batches", r.batches},
                              {"throughput_rps", r.throughput_rps},
                              {"p50_batch_ms", r.p50_batch_ms},
                              {"p99_batch_ms", r.p99_batch_ms},
                              {"batch_interval_ms", r.batch_interval_ms},
                              {"result", r.pass() ? "PASS" : "FAIL"}});
    return r.pass() ? kExitOk : kExitFailure;
  }

  index::IndexStore store;
  stream::PipelineMetrics metrics;
  const auto r = run_demo(config, options, store, metrics, &logger);
  logger.result("demo", {{"produced", r.produced},
                         {"distinct_pairs", r.distinct_pairs},
                         {"indexed", r.indexed_positions},
                         {"windows", r.window_docs},
                         {"batches", r.batches},
                         {"crashes", r.crashes},
                         {"late_dropped", r.late_dropped},
                         {"dead_letter", r.dead_letter},
                         {"p50_batch_ms", r.p50_batch_ms},
                         {"p99_batch_ms", r.p99_batch_ms},
                         {"throughput_rps", r.throughput_rps},
                         {"wall_seconds", r.wall_seconds},
                         {"exactly_once", r.exactly_once() ? "PASS" : "FAIL"}});
  if (!r.exactly_once()) return kExitFailure;
  if (!serve) return kExitOk;

  service::DatasetRegistry datasets;
  load_datasets(config, datasets);
  service::ServiceOptions sopts;
  sopts.indexes = config.indexes;
  sopts.cors = config.cors;
  service::QueryService svc(store, &metrics, &datasets, sopts);
  return serve_until_stopped(config, svc, logger, stop);
}

}  // namespace skystream::cli
