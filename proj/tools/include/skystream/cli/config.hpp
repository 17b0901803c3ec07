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

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "skystream/log/commit_log.hpp"
#include "skystream/sim/fleet.hpp"
#include "skystream/stream/actions.hpp"
#include "skystream/stream/micro_batch.hpp"

namespace skystream::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::filesystem::path data_dir{"skystream-data"};
  log::TopicConfig topic{"flight-positions", 4, 1, {}, 64ull << 20};
  std::uint32_t flush_every_n{1};
  stream::StreamConfig stream;
  sim::SimConfig sim;
  std::int64_t sim_duration_seconds{3600};
  std::optional<std::filesystem::path> airports_file;
  stream::IndexNames indexes;
  std::string api_host{"127.0.0.1"};
  int api_port{8080};
  bool cors{true};
  std::string log_level{"info"};

  std::filesystem::path log_dir() const { return data_dir / "log"; }
  std::filesystem::path index_dir() const { return data_dir / "index"; }
  std::filesystem::path dataset_dir() const { return data_dir / "datasets"; }

  /// Cross-field checks. Throws ConfigError.
  void validate() const;
};

enum class Source { kDefault, kFile, kEnv, kFlag };

std::string_view to_string(Source source);

/// One configurable value. `key` is the dotted path inside the config file;
/// the environment variable is SKYSTREAM_<KEY> with dots as underscores and
/// the flag is --<key> with dots and underscores as dashes.
struct Setting {
  std::string key;
  std::string help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<nlohmann::json(const RunConfig&)> get;

  std::string env_name() const;
  std::string flag_name() const;
};

const std::vector<Setting>& settings();

struct ResolvedConfig {
  RunConfig config;
  std::map<std::string, Source> sources;
};

/// Precedence: flags > environment > file > defaults. `file` is the parsed
/// config file (nested objects), `env` maps variable names to values, and
/// `flags` maps setting keys to values. Throws ConfigError.
ResolvedConfig resolve_config(const nlohmann::json* file, const std::map<std::string, std::string>& env,
                              const std::map<std::string, std::string>& flags);

/// Reads SKYSTREAM_* variables from the process environment.
std::map<std::string, std::string> process_environment();

/// Throws ConfigError on unreadable or non-JSON content.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Effective configuration as nested JSON, the same shape as a config file.
nlohmann::json effective_config_json(const RunConfig& config);

}  // namespace skystream::cli
