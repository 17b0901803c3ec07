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
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skystream/cli/config.hpp"
#include "skystream/cli/logging.hpp"
#include "skystream/histbatch/summary.hpp"
#include "skystream/index/index.hpp"
#include "skystream/log/commit_log.hpp"
#include "skystream/sim/airports.hpp"
#include "skystream/stream/pipeline.hpp"

namespace skystream::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitStorage = 3,
  kExitNetwork = 4,
};

/// Maps an exception to its failure class.
int exit_code_for(const std::exception& e);

std::unique_ptr<log::CommitLog> open_log(const RunConfig& config, const std::filesystem::path& dir);
/// Creates the configured topic unless it exists; an existing topic must
/// have the configured partition count.
log::Topic& ensure_topic(log::CommitLog& log, const RunConfig& config);

std::vector<sim::Airport> fleet_airports(const RunConfig& config);

struct SimulateReport {
  std::uint64_t produced{0};
  std::uint64_t ticks{0};
};

/// Produces tick(fleet, t) for t in [start, start + duration) keyed by
/// flight_icao, with the tick time as log timestamp.
SimulateReport run_simulate(const RunConfig& config, log::CommitLog& log, stream::PipelineMetrics* metrics = nullptr,
                            std::stop_token stop = {});

/// Produces the valid entries of recorded API pages. Returns (produced, dead letters).
std::pair<std::uint64_t, std::uint64_t> run_replay(const RunConfig& config, log::CommitLog& log,
                                                   const std::vector<std::filesystem::path>& pages,
                                                   stream::PipelineMetrics* metrics = nullptr);

struct DemoOptions {
  std::optional<std::uint64_t> crash_after_batch;
  /// Wipe <data_dir>/demo before starting.
  bool fresh{true};
};

struct DemoReport {
  std::uint64_t produced{0};
  std::uint64_t distinct_pairs{0};
  std::uint64_t indexed_positions{0};
  std::uint64_t window_docs{0};
  std::uint64_t windows_closed{0};
  std::uint64_t batches{0};
  std::uint64_t crashes{0};
  std::uint64_t consumed{0};
  std::uint64_t late_dropped{0};
  std::uint64_t dead_letter{0};
  double p50_batch_ms{0.0};
  double p99_batch_ms{0.0};
  double pipeline_seconds{0.0};
  double throughput_rps{0.0};
  double wall_seconds{0.0};

  bool exactly_once() const { return indexed_positions == distinct_pairs; }
};

/// simulate -> pipeline until drained (simulated clock) -> close windows.
/// The populated indexes stay in `store` for serving.
DemoReport run_demo(const RunConfig& config, const DemoOptions& options, index::IndexStore& store,
                    stream::PipelineMetrics& metrics, Logger* logger = nullptr);

struct SustainOptions {
  int seconds{30};
  double target_rate{6000.0};
  std::int64_t flight_count{4000};
};

struct SustainReport {
  std::uint64_t produced{0};
  std::uint64_t indexed{0};
  std::uint64_t batches{0};
  double seconds{0.0};
  double throughput_rps{0.0};
  double p50_batch_ms{0.0};
  double p99_batch_ms{0.0};
  double batch_interval_ms{0.0};

  bool pass() const { return throughput_rps >= 5000.0 && p99_batch_ms < 2.0 * batch_interval_ms; }
};

/// Wall-clock run: a producer thread paced at target_rate and the pipeline
/// polling on its batch interval, concurrently.
SustainReport run_sustain(const RunConfig& config, const SustainOptions& options, Logger* logger = nullptr);

struct AnalyzeOptions {
  std::filesystem::path csv;
  std::optional<std::filesystem::path> out;
  std::string dataset_id{"default"};
  /// Compare against the December 2023 reference figures.
  bool reference_check{false};
};

struct AnalyzeReport {
  histbatch::BtsParseResult parsed;
  histbatch::DelaySummary summary;
  std::filesystem::path written;
  std::optional<bool> reference_ok;
};

inline constexpr std::uint64_t kReferenceTotalFlights = 570'394;
inline constexpr double kReferenceOnTimePct = 83.43;
inline constexpr double kReferenceDelayedPct = 16.57;
inline constexpr double kReferenceTolerancePct = 0.01;

bool matches_reference(const histbatch::DelaySummary& summary);

AnalyzeReport run_analyze(const RunConfig& config, const AnalyzeOptions& options);

/// Documents of an index in doc_id order without versions, for comparing
/// index states by content.
nlohmann::json index_contents(const index::Index& idx);

/// Percentile by nearest rank over unsorted samples; 0 for none.
double percentile(std::vector<double> samples, double p);

int cmd_broker_init(const RunConfig& config, Logger& logger);
int cmd_simulate(const RunConfig& config, const std::vector<std::filesystem::path>& replay, Logger& logger);
int cmd_pipeline(const RunConfig& config, bool drain, Logger& logger, std::stop_token stop);
int cmd_serve(const RunConfig& config, Logger& logger, std::stop_token stop);
int cmd_analyze(const RunConfig& config, const AnalyzeOptions& options, Logger& logger);
int cmd_demo(const RunConfig& config, const DemoOptions& options, bool serve,
             const std::optional<SustainOptions>& sustain, Logger& logger, std::stop_token stop);

}  // namespace skystream::cli
