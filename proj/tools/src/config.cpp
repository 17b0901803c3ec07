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

#include "skystream/cli/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

#include "skystream/index/index.hpp"

extern char** environ;

namespace skystream::cli {

using nlohmann::json;

namespace {

std::int64_t to_int(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const auto n = to_int(key, v);
  if (n < 0) throw ConfigError(key + ": must be >= 0");
  return static_cast<std::uint64_t>(n);
}

int to_small_int(const std::string& key, const std::string& v) {
  const auto n = to_int(key, v);
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": out of range");
  }
  return static_cast<int>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::vector<Setting> build_settings() {
  std::vector<Setting> s;
  auto add = [&s](std::string key, std::string help, std::function<void(RunConfig&, const std::string&)> set,
                  std::function<json(const RunConfig&)> get) {
    s.push_back({std::move(key), std::move(help), std::move(set), std::move(get)});
  };

  add("data_dir", "root directory for log segments, index snapshots and datasets",
      [](RunConfig& c, const std::string& v) { c.data_dir = v; },
      [](const RunConfig& c) { return json(c.data_dir.string()); });
  add("log.level", "debug, info, warn or error",
      [](RunConfig& c, const std::string& v) { c.log_level = v; },
      [](const RunConfig& c) { return json(c.log_level); });

  add("broker.topic", "topic carrying flight positions",
      [](RunConfig& c, const std::string& v) { c.topic.name = v; },
      [](const RunConfig& c) { return json(c.topic.name); });
  add("broker.partitions", "partition count for new topics",
      [](RunConfig& c, const std::string& v) { c.topic.partitions = to_small_int("broker.partitions", v); },
      [](const RunConfig& c) { return json(c.topic.partitions); });
  add("broker.replication_factor", "recorded only; the log keeps one copy",
      [](RunConfig& c, const std::string& v) {
        c.topic.replication_factor = to_small_int("broker.replication_factor", v);
      },
      [](const RunConfig& c) { return json(c.topic.replication_factor); });
  add("broker.segment_max_bytes", "segment roll size",
      [](RunConfig& c, const std::string& v) { c.topic.segment_max_bytes = to_uint("broker.segment_max_bytes", v); },
      [](const RunConfig& c) { return json(c.topic.segment_max_bytes); });
  add("broker.retention_max_age_seconds", "empty for unlimited",
      [](RunConfig& c, const std::string& v) {
        c.topic.retention.max_age_seconds =
            v.empty() ? std::nullopt : std::optional(to_int("broker.retention_max_age_seconds", v));
      },
      [](const RunConfig& c) { return optional_json(c.topic.retention.max_age_seconds); });
  add("broker.retention_max_bytes", "per partition; empty for unlimited",
      [](RunConfig& c, const std::string& v) {
        c.topic.retention.max_bytes_per_partition =
            v.empty() ? std::nullopt : std::optional(to_uint("broker.retention_max_bytes", v));
      },
      [](const RunConfig& c) { return optional_json(c.topic.retention.max_bytes_per_partition); });
  add("broker.flush_every_n", "records buffered before a write to the OS",
      [](RunConfig& c, const std::string& v) {
        const auto n = to_uint("broker.flush_every_n", v);
        if (n < 1 || n > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("broker.flush_every_n: out of range");
        c.flush_every_n = static_cast<std::uint32_t>(n);
      },
      [](const RunConfig& c) { return json(c.flush_every_n); });

  add("pipeline.batch_interval_seconds", "micro-batch interval",
      [](RunConfig& c, const std::string& v) {
        c.stream.batch_interval_seconds = to_small_int("pipeline.batch_interval_seconds", v);
      },
      [](const RunConfig& c) { return json(c.stream.batch_interval_seconds); });
  add("pipeline.window_seconds", "tumbling window width",
      [](RunConfig& c, const std::string& v) { c.stream.window_seconds = to_small_int("pipeline.window_seconds", v); },
      [](const RunConfig& c) { return json(c.stream.window_seconds); });
  add("pipeline.allowed_lateness_seconds", "watermark lag behind the newest event",
      [](RunConfig& c, const std::string& v) {
        c.stream.allowed_lateness_seconds = to_small_int("pipeline.allowed_lateness_seconds", v);
      },
      [](const RunConfig& c) { return json(c.stream.allowed_lateness_seconds); });
  add("pipeline.group_id", "consumer group",
      [](RunConfig& c, const std::string& v) { c.stream.group_id = v; },
      [](const RunConfig& c) { return json(c.stream.group_id); });
  add("pipeline.parallelism", "fetch workers",
      [](RunConfig& c, const std::string& v) { c.stream.parallelism = to_small_int("pipeline.parallelism", v); },
      [](const RunConfig& c) { return json(c.stream.parallelism); });
  add("pipeline.max_records_per_partition", "per-batch cap",
      [](RunConfig& c, const std::string& v) {
        c.stream.max_records_per_partition = to_uint("pipeline.max_records_per_partition", v);
      },
      [](const RunConfig& c) { return json(c.stream.max_records_per_partition); });
  add("pipeline.positions_index", "index receiving position documents",
      [](RunConfig& c, const std::string& v) { c.indexes.positions = v; },
      [](const RunConfig& c) { return json(c.indexes.positions); });
  add("pipeline.windows_index", "index receiving window snapshots",
      [](RunConfig& c, const std::string& v) { c.indexes.windows = v; },
      [](const RunConfig& c) { return json(c.indexes.windows); });

  add("sim.seed", "generator seed",
      [](RunConfig& c, const std::string& v) { c.sim.seed = to_uint("sim.seed", v); },
      [](const RunConfig& c) { return json(c.sim.seed); });
  add("sim.flight_count", "flights in the synthetic fleet",
      [](RunConfig& c, const std::string& v) { c.sim.flight_count = to_int("sim.flight_count", v); },
      [](const RunConfig& c) { return json(c.sim.flight_count); });
  add("sim.tick_seconds", "seconds between position reports",
      [](RunConfig& c, const std::string& v) { c.sim.tick_seconds = to_int("sim.tick_seconds", v); },
      [](const RunConfig& c) { return json(c.sim.tick_seconds); });
  add("sim.start_time", "epoch seconds of the first tick",
      [](RunConfig& c, const std::string& v) { c.sim.start_time = EventTime{to_int("sim.start_time", v)}; },
      [](const RunConfig& c) { return json(c.sim.start_time.seconds); });
  add("sim.departure_spread_seconds", "departures are spread over this span",
      [](RunConfig& c, const std::string& v) {
        c.sim.departure_spread_seconds = to_int("sim.departure_spread_seconds", v);
      },
      [](const RunConfig& c) { return json(c.sim.departure_spread_seconds); });
  add("sim.duration_seconds", "simulated span produced by simulate and demo",
      [](RunConfig& c, const std::string& v) { c.sim_duration_seconds = to_int("sim.duration_seconds", v); },
      [](const RunConfig& c) { return json(c.sim_duration_seconds); });
  add("sim.airports_file", "airport CSV (icao,lat,lng,state); empty for the built-in table",
      [](RunConfig& c, const std::string& v) {
        c.airports_file = v.empty() ? std::nullopt : std::optional<std::filesystem::path>(v);
      },
      [](const RunConfig& c) { return c.airports_file ? json(c.airports_file->string()) : json(nullptr); });

  add("api.host", "bind address",
      [](RunConfig& c, const std::string& v) { c.api_host = v; },
      [](const RunConfig& c) { return json(c.api_host); });
  add("api.port", "bind port",
      [](RunConfig& c, const std::string& v) { c.api_port = to_small_int("api.port", v); },
      [](const RunConfig& c) { return json(c.api_port); });
  add("api.cors", "send permissive CORS headers",
      [](RunConfig& c, const std::string& v) { c.cors = to_bool("api.cors", v); },
      [](const RunConfig& c) { return json(c.cors); });
  return s;
}

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    return;
  }
  if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? "true" : "false";
  } else if (j.is_number_integer() || j.is_number_unsigned()) {
    out[prefix] = j.dump();
  } else if (j.is_null()) {
    out[prefix] = "";
  } else {
    throw ConfigError(prefix + ": unsupported value " + j.dump());
  }
}

}  // namespace

std::string_view to_string(Source source) {
  switch (source) {
    case Source::kDefault: return "default";
    case Source::kFile: return "file";
    case Source::kEnv: return "env";
    case Source::kFlag: return "flag";
  }
  return "unknown";
}

std::string Setting::env_name() const {
  std::string out = "SKYSTREAM_";
  for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

std::string Setting::flag_name() const {
  std::string out = "--";
  for (char c : key) out.push_back(c == '.' || c == '_' ? '-' : c);
  return out;
}

const std::vector<Setting>& settings() {
  static const std::vector<Setting> all = build_settings();
  return all;
}

void RunConfig::validate() const {
  try {
    topic.validate();
    stream.validate();
    sim.validate();
    index::IndexConfig{indexes.positions}.validate();
    index::IndexConfig{indexes.windows}.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (indexes.positions == indexes.windows) throw ConfigError("positions and windows indexes must differ");
  if (sim_duration_seconds < 0) throw ConfigError("sim.duration_seconds must be >= 0");
  if (api_port < 0 || api_port > 65535) throw ConfigError("api.port must be in [0, 65535]");
  if (log_level != "debug" && log_level != "info" && log_level != "warn" && log_level != "error") {
    throw ConfigError("log.level must be debug, info, warn or error");
  }
  if (data_dir.empty()) throw ConfigError("data_dir must be non-empty");
}

ResolvedConfig resolve_config(const json* file, const std::map<std::string, std::string>& env,
                              const std::map<std::string, std::string>& flags) {
  std::map<std::string, std::string> from_file;
  if (file) {
    if (!file->is_object()) throw ConfigError("config file must hold a JSON object");
    flatten(*file, "", from_file);
  }
  std::map<std::string, const Setting*> by_key;
  for (const auto& s : settings()) by_key[s.key] = &s;
  for (const auto& [k, _] : from_file) {
    if (!by_key.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  }
  for (const auto& [k, _] : flags) {
    if (!by_key.contains(k)) throw ConfigError("unknown setting '" + k + "'");
  }

  ResolvedConfig out;
  for (const auto& s : settings()) {
    out.sources[s.key] = Source::kDefault;
    if (auto it = from_file.find(s.key); it != from_file.end()) {
      s.set(out.config, it->second);
      out.sources[s.key] = Source::kFile;
    }
    if (auto it = env.find(s.env_name()); it != env.end()) {
      s.set(out.config, it->second);
      out.sources[s.key] = Source::kEnv;
    }
    if (auto it = flags.find(s.key); it != flags.end()) {
      s.set(out.config, it->second);
      out.sources[s.key] = Source::kFlag;
    }
  }
  out.config.validate();
  return out;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (!kv.starts_with("SKYSTREAM_")) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    out.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return out;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

json effective_config_json(const RunConfig& config) {
  json out = json::object();
  for (const auto& s : settings()) out[json::json_pointer("/" + [&] {
    std::string p = s.key;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }())] = s.get(config);
  return out;
}

}  // namespace skystream::cli
