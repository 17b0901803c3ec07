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

#include <iosfwd>
#include <mutex>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace skystream::cli {

enum class Level { kDebug, kInfo, kWarn, kError };

Level parse_level(std::string_view name);

/// key=value field. Values containing spaces, quotes or '=' are quoted.
struct Field {
  std::string key;
  std::string value;

  Field(std::string k, std::string v) : key(std::move(k)), value(std::move(v)) {}
  Field(std::string k, const char* v) : key(std::move(k)), value(v) {}
  Field(std::string k, std::string_view v) : key(std::move(k)), value(v) {}
  template <typename T, typename = std::enable_if_t<std::is_arithmetic_v<T>>>
  Field(std::string k, T v) : key(std::move(k)), value(format(v)) {}

 private:
  template <typename T>
  static std::string format(T v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v ? "true" : "false";
    } else if constexpr (std::is_floating_point_v<T>) {
      return format_double(static_cast<double>(v));
    } else {
      return std::to_string(v);
    }
  }
  static std::string format_double(double v);
};

/// Line-oriented structured log: `ts=<utc> level=<l> event=<e> k=v ...`.
class Logger {
 public:
  Logger(std::ostream& out, Level min_level) : out_(out), min_(min_level) {}

  void log(Level level, std::string_view event, const std::vector<Field>& fields = {});
  void debug(std::string_view e, const std::vector<Field>& f = {}) { log(Level::kDebug, e, f); }
  void info(std::string_view e, const std::vector<Field>& f = {}) { log(Level::kInfo, e, f); }
  void warn(std::string_view e, const std::vector<Field>& f = {}) { log(Level::kWarn, e, f); }
  void error(std::string_view e, const std::vector<Field>& f = {}) { log(Level::kError, e, f); }

  /// Result line without timestamp or level, for scraping.
  void result(std::string_view event, const std::vector<Field>& fields);

 private:
  std::ostream& out_;
  Level min_;
  std::mutex mu_;
};

std::string format_fields(const std::vector<Field>& fields);

}  // namespace skystream::cli
