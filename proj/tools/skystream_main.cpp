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

#include <atomic>
#include <csignal>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "skystream/cli/commands.hpp"

namespace {

std::atomic<bool> g_signalled{false};

extern "C" void on_signal(int) { g_signalled.store(true); }

}  // namespace

int main(int argc, char** argv) {
  using namespace skystream::cli;

  CLI::App app{"SkyStream: flight telemetry streaming, indexing and delay analytics", "skystream"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_flag("--print-config", print_config, "Print the effective configuration and exit");

  std::map<std::string, std::string> flag_values;
  for (const auto& s : settings()) {
    app.add_option(s.flag_name(), flag_values[s.key], s.help + " [env " + s.env_name() + "]")->group("Settings");
  }

  auto* broker_init = app.add_subcommand("broker-init", "Create the positions topic");

  auto* simulate = app.add_subcommand("simulate", "Produce simulated or recorded flight positions");
  std::vector<std::string> replay;
  simulate->add_option("--replay", replay, "Recorded API response pages to produce instead")
      ->check(CLI::ExistingFile);

  auto* pipeline = app.add_subcommand("pipeline", "Consume, window and index positions");
  bool drain = false;
  pipeline->add_flag("--drain", drain, "Exit once the topic is fully consumed");

  auto* serve = app.add_subcommand("serve", "Serve the query API over stored indexes");

  auto* analyze = app.add_subcommand("analyze", "Summarize a BTS on-time performance CSV");
  AnalyzeOptions analyze_opts;
  std::string analyze_csv;
  std::string analyze_out;
  analyze->add_option("csv", analyze_csv, "BTS CSV file")->required();
  analyze->add_option("--out", analyze_out, "Output JSON (default <data_dir>/datasets/<id>.json)");
  analyze->add_option("--dataset-id", analyze_opts.dataset_id, "Dataset id for the query API");
  analyze->add_flag("--reference-check", analyze_opts.reference_check,
                    "Compare against the December 2023 reference figures");

  auto* demo = app.add_subcommand("demo", "Simulate, process and serve in one process");
  DemoOptions demo_opts;
  std::uint64_t crash_after = 0;
  bool no_serve = false;
  int sustain_seconds = 0;
  SustainOptions sustain_opts;
  demo->add_option("--crash-after-batch", crash_after, "Inject a crash after indexing this batch, then restart");
  demo->add_flag("--no-serve", no_serve, "Exit after processing");
  demo->add_option("--sustain-seconds", sustain_seconds, "Run the wall-clock throughput check instead");
  demo->add_option("--sustain-rate", sustain_opts.target_rate, "Producer rate for the throughput check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; every usage error is a configuration error.
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  Logger boot(std::cerr, Level::kInfo);
  try {
    std::unique_ptr<nlohmann::json> file;
    if (!config_path.empty()) file = std::make_unique<nlohmann::json>(load_config_file(config_path));
    std::map<std::string, std::string> flags;
    for (const auto& s : settings()) {
      if (app.count(s.flag_name()) > 0) flags[s.key] = flag_values[s.key];
    }
    const auto resolved = resolve_config(file.get(), process_environment(), flags);
    const auto& config = resolved.config;

    if (print_config) {
      std::cout << effective_config_json(config).dump(2) << "\n";
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return kExitConfig;
    }

    Logger logger(std::cerr, parse_level(config.log_level));
    std::stop_source stop;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::jthread watcher([&stop](std::stop_token self) {
      while (!self.stop_requested()) {
        if (g_signalled.load()) {
          stop.request_stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
    });

    if (*broker_init) return cmd_broker_init(config, logger);
    if (*simulate) return cmd_simulate(config, {replay.begin(), replay.end()}, logger);
    if (*pipeline) return cmd_pipeline(config, drain, logger, stop.get_token());
    if (*serve) return cmd_serve(config, logger, stop.get_token());
    if (*analyze) {
      analyze_opts.csv = analyze_csv;
      if (!analyze_out.empty()) analyze_opts.out = analyze_out;
      return cmd_analyze(config, analyze_opts, logger);
    }
    if (*demo) {
      if (demo->count("--crash-after-batch") > 0) demo_opts.crash_after_batch = crash_after;
      std::optional<SustainOptions> sustain;
      if (sustain_seconds > 0) {
        sustain_opts.seconds = sustain_seconds;
        sustain = sustain_opts;
      }
      return cmd_demo(config, demo_opts, !no_serve, sustain, logger, stop.get_token());
    }
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    boot.error("fatal", {{"error", e.what()}, {"exit_code", code}});
    return code;
  }
  return kExitOk;
}
