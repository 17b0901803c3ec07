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

#include <cstdlib>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "skystream/cli/commands.hpp"
#include "skystream/sim/fleet.hpp"
#include "test_support.hpp"

namespace skystream::cli {
namespace {

using nlohmann::json;
using skystream::testing::fixture;
using skystream::testing::read_file;
using skystream::testing::TempDir;

const Setting& setting(const std::string& key) {
  for (const auto& s : settings()) {
    if (s.key == key) return s;
  }
  throw std::out_of_range(key);
}

TEST(Config, NamingConventions) {
  EXPECT_EQ(setting("broker.partitions").env_name(), "SKYSTREAM_BROKER_PARTITIONS");
  EXPECT_EQ(setting("broker.partitions").flag_name(), "--broker-partitions");
  EXPECT_EQ(setting("pipeline.batch_interval_seconds").flag_name(), "--pipeline-batch-interval-seconds");
  EXPECT_EQ(setting("data_dir").env_name(), "SKYSTREAM_DATA_DIR");
}

TEST(Config, DefaultsAreValid) {
  const auto r = resolve_config(nullptr, {}, {});
  EXPECT_EQ(r.config.topic.partitions, 4);
  EXPECT_EQ(r.config.stream.batch_interval_seconds, 5);
  for (const auto& [_, src] : r.sources) EXPECT_EQ(src, Source::kDefault);
}

// Property: for every subset of layers, the highest layer present wins.
TEST(Config, PrecedenceFlagEnvFileDefault) {
  const std::vector<std::string> keys{"broker.partitions", "sim.seed", "pipeline.window_seconds", "api.port"};
  const std::map<std::string, std::array<std::string, 3>> values{
      {"broker.partitions", {"2", "3", "5"}},
      {"sim.seed", {"11", "12", "13"}},
      {"pipeline.window_seconds", {"30", "120", "300"}},
      {"api.port", {"9001", "9002", "9003"}}};
  std::mt19937 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    json file = json::object();
    std::map<std::string, std::string> env, flags;
    std::map<std::string, std::pair<Source, std::string>> expected;
    for (const auto& k : keys) {
      const auto& v = values.at(k);
      expected[k] = {Source::kDefault, setting(k).get(RunConfig{}).dump()};
      if (rng() % 2) {
        const auto dot = k.find('.');
        file[k.substr(0, dot)][k.substr(dot + 1)] = std::stoll(v[0]);
        expected[k] = {Source::kFile, v[0]};
      }
      if (rng() % 2) {
        env[setting(k).env_name()] = v[1];
        expected[k] = {Source::kEnv, v[1]};
      }
      if (rng() % 2) {
        flags[k] = v[2];
        expected[k] = {Source::kFlag, v[2]};
      }
    }
    const auto r = resolve_config(&file, env, flags);
    for (const auto& k : keys) {
      EXPECT_EQ(r.sources.at(k), expected[k].first) << k;
      EXPECT_EQ(setting(k).get(r.config).dump(), expected[k].second) << k;
    }
  }
}

TEST(Config, Errors) {
  const json unknown{{"broker", {{"nope", 1}}}};
  EXPECT_THROW(resolve_config(&unknown, {}, {}), ConfigError);
  EXPECT_THROW(resolve_config(nullptr, {}, {{"broker.partitions", "zero"}}), ConfigError);
  EXPECT_THROW(resolve_config(nullptr, {}, {{"broker.partitions", "0"}}), ConfigError);
  EXPECT_THROW(resolve_config(nullptr, {}, {{"pipeline.window_seconds", "7"}}), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/skystream.json"), ConfigError);
}

TEST(Config, EffectiveConfigFeedsBackAsFile) {
  auto r = resolve_config(nullptr, {}, {{"sim.seed", "77"}, {"broker.partitions", "6"}});
  const auto j = effective_config_json(r.config);
  const auto again = resolve_config(&j, {}, {});
  EXPECT_EQ(effective_config_json(again.config), j);
  EXPECT_EQ(again.config.sim.seed, 77u);
}

TEST(Logging, LineFormat) {
  std::ostringstream out;
  Logger logger(out, Level::kInfo);
  logger.debug("hidden");
  logger.info("batch", {{"id", 3}, {"note", "two words"}, {"ok", true}});
  logger.result("done", {{"count", std::uint64_t{5}}});
  const auto text = out.str();
  EXPECT_EQ(text.find("hidden"), std::string::npos);
  EXPECT_NE(text.find(" level=info event=batch id=3 note=\"two words\" ok=true\n"), std::string::npos);
  EXPECT_EQ(text.substr(0, 3), "ts=");
  EXPECT_NE(text.find("\nevent=done count=5\n"), std::string::npos);
  EXPECT_THROW(parse_level("loud"), ConfigError);
}

TEST(Percentile, NearestRank) {
  EXPECT_EQ(percentile({}, 50), 0.0);
  EXPECT_EQ(percentile({5, 1, 3, 2, 4}, 50), 3.0);
  EXPECT_EQ(percentile({5, 1, 3, 2, 4}, 99), 5.0);
  EXPECT_EQ(percentile({5, 1, 3, 2, 4}, 0), 1.0);
}

RunConfig small_config(const TempDir& dir) {
  auto r = resolve_config(nullptr, {},
                          {{"data_dir", dir.path().string()},
                           {"sim.flight_count", "40"},
                           {"sim.duration_seconds", "900"},
                           {"sim.departure_spread_seconds", "300"}});
  return r.config;
}

TEST(Simulate, ProducesExactlyTheAirborneCount) {
  TempDir dir;
  const auto cfg = small_config(dir);
  auto log = open_log(cfg, cfg.log_dir());
  ensure_topic(*log, cfg);
  const auto report = run_simulate(cfg, *log);

  const auto fleet = sim::generate_fleet(cfg.sim, sim::embedded_airports());
  std::uint64_t expected = 0;
  for (auto t = cfg.sim.start_time.seconds; t < cfg.sim.start_time.seconds + cfg.sim_duration_seconds;
       t += cfg.sim.tick_seconds) {
    for (const auto& plan : fleet) {
      const auto elapsed = static_cast<double>(t - plan.depart_time.seconds);
      expected += elapsed > 0 && plan.cruise_speed * elapsed / 3600.0 < sim::route_length_km(plan);
    }
  }
  EXPECT_EQ(report.ticks, 180u);
  EXPECT_EQ(report.produced, expected);
  std::uint64_t in_log = 0;
  const auto& topic = log->topic(cfg.topic.name);
  for (int p = 0; p < topic.partition_count(); ++p) in_log += static_cast<std::uint64_t>(topic.high_watermark(p));
  EXPECT_EQ(in_log, report.produced);
}

TEST(Simulate, ZeroDurationAndDeterminism) {
  TempDir a, b;
  auto cfg_a = small_config(a);
  auto cfg_b = small_config(b);
  auto log_a = open_log(cfg_a, cfg_a.log_dir());
  auto log_b = open_log(cfg_b, cfg_b.log_dir());
  ensure_topic(*log_a, cfg_a);
  ensure_topic(*log_b, cfg_b);
  EXPECT_EQ(run_simulate(cfg_a, *log_a).produced, run_simulate(cfg_b, *log_b).produced);
  for (int p = 0; p < cfg_a.topic.partitions; ++p) {
    const auto fa = log_a->fetch(cfg_a.topic.name, p, 0, 100000);
    const auto fb = log_b->fetch(cfg_b.topic.name, p, 0, 100000);
    ASSERT_EQ(fa.size(), fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(fa[i].value, fb[i].value);
  }

  TempDir z;
  auto cfg_z = small_config(z);
  cfg_z.sim_duration_seconds = 0;
  auto log_z = open_log(cfg_z, cfg_z.log_dir());
  ensure_topic(*log_z, cfg_z);
  EXPECT_EQ(run_simulate(cfg_z, *log_z).produced, 0u);
}

TEST(EnsureTopic, PartitionMismatchIsConfigError) {
  TempDir dir;
  auto cfg = small_config(dir);
  auto log = open_log(cfg, cfg.log_dir());
  ensure_topic(*log, cfg);
  cfg.topic.partitions = 8;
  EXPECT_THROW(ensure_topic(*log, cfg), ConfigError);
}

TEST(Replay, RecordedPageCountsDeadLetters) {
  TempDir dir;
  const auto cfg = small_config(dir);
  auto log = open_log(cfg, cfg.log_dir());
  ensure_topic(*log, cfg);
  const auto [produced, dead] = run_replay(cfg, *log, {fixture("api_page1.json")});
  EXPECT_EQ(produced, 2u);
  EXPECT_EQ(dead, 1u);
}

TEST(Analyze, WritesGoldenSummary) {
  TempDir dir;
  const auto cfg = small_config(dir);
  AnalyzeOptions opts;
  opts.csv = fixture("bts_synthetic_10k.csv");
  opts.dataset_id = "synthetic";
  const auto r = run_analyze(cfg, opts);
  EXPECT_EQ(r.written, cfg.dataset_dir() / "synthetic.json");
  EXPECT_EQ(json::parse(read_file(r.written)), json::parse(read_file(fixture("bts_synthetic_10k.summary.json"))));
  EXPECT_FALSE(r.reference_ok);
}

TEST(Analyze, ReferenceToleranceBoundary) {
  histbatch::DelaySummary s;
  s.total_flights = kReferenceTotalFlights;
  s.on_time_pct_hundredths = 8343;
  s.delayed_pct_hundredths = 1657;
  EXPECT_TRUE(matches_reference(s));
  s.on_time_pct_hundredths = 8344;
  s.delayed_pct_hundredths = 1656;
  EXPECT_TRUE(matches_reference(s));
  s.on_time_pct_hundredths = 8345;
  s.delayed_pct_hundredths = 1655;
  EXPECT_FALSE(matches_reference(s));
  s.on_time_pct_hundredths = 8343;
  s.delayed_pct_hundredths = 1657;
  s.total_flights -= 1;
  EXPECT_FALSE(matches_reference(s));
}

TEST(Demo, SmallRunIsExactlyOnceAcrossACrash) {
  TempDir dir;
  const auto cfg = small_config(dir);
  index::IndexStore clean_store;
  stream::PipelineMetrics m1;
  const auto clean = run_demo(cfg, {}, clean_store, m1);
  EXPECT_GT(clean.produced, 500u);
  EXPECT_TRUE(clean.exactly_once());
  EXPECT_EQ(clean.crashes, 0u);

  index::IndexStore crashed_store;
  stream::PipelineMetrics m2;
  DemoOptions opts;
  opts.crash_after_batch = 3;
  const auto crashed = run_demo(cfg, opts, crashed_store, m2);
  EXPECT_EQ(crashed.crashes, 1u);
  EXPECT_TRUE(crashed.exactly_once());
  for (const auto& name : {cfg.indexes.positions, cfg.indexes.windows}) {
    EXPECT_EQ(index_contents(*crashed_store.get(name)), index_contents(*clean_store.get(name))) << name;
  }
}

TEST(ExitCodes, Classification) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), kExitConfig);
  EXPECT_EQ(exit_code_for(log::LogError(log::LogErrc::kInvalidConfig, "x")), kExitConfig);
  EXPECT_EQ(exit_code_for(log::LogError(log::LogErrc::kIo, "x")), kExitStorage);
  EXPECT_EQ(exit_code_for(histbatch::HistError(histbatch::HistErrc::kIo, "x")), kExitStorage);
  EXPECT_EQ(exit_code_for(histbatch::HistError(histbatch::HistErrc::kMissingColumn, "x")), kExitFailure);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kExitFailure);
}

int run_cli(const std::string& args) {
  const auto cmd = std::string(SKYSTREAM_CLI_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, ExitCodes) {
  TempDir dir;
  const auto data = "--data-dir " + dir.path().string();
  EXPECT_EQ(run_cli(data + " --print-config"), 0);
  EXPECT_EQ(run_cli(data + " --broker-partitions 0 broker-init"), 2);
  EXPECT_EQ(run_cli(data + " broker-init"), 0);
  EXPECT_EQ(run_cli(data + " --broker-partitions 3 broker-init"), 2);
  EXPECT_EQ(run_cli(data + " analyze /nonexistent/file.csv"), 3);
  EXPECT_EQ(run_cli(data + " analyze " + fixture("bts_missing_fl_date.csv").string()), 1);
  EXPECT_EQ(run_cli(data + " --sim-flight-count 5 --sim-duration-seconds 60 simulate"), 0);
  EXPECT_EQ(run_cli(data + " --no-such-flag"), 2);
}

}  // namespace
}  // namespace skystream::cli
