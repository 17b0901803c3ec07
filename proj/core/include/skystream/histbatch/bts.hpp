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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skystream::histbatch {

enum class HistErrc { kMissingColumn, kEmptyFile, kEmptyDataset, kUnknownDimension, kIo, kMalformedSummary };

std::string_view to_string(HistErrc code);

class HistError : public std::runtime_error {
 public:
  HistError(HistErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  HistErrc code() const noexcept { return code_; }

 private:
  HistErrc code_;
};

/// Proleptic Gregorian calendar date.
struct CivilDate {
  int year{1970};
  int month{1};
  int day{1};

  /// 0 = Monday ... 6 = Sunday.
  int weekday() const;
  auto operator<=>(const CivilDate&) const = default;
};

/// Accepts YYYY-MM-DD and M/D/YYYY, optionally followed by a time part.
std::optional<CivilDate> parse_civil_date(std::string_view text);

struct BtsRecord {
  CivilDate fl_date;
  std::string carrier;
  std::string fl_num;
  std::string origin;
  std::string origin_state;
  std::string dest;
  std::optional<std::int64_t> dep_delay;  // minutes, signed
  bool cancelled{false};
  std::optional<std::int64_t> weather_delay;
  std::optional<std::int64_t> nas_delay;
  std::optional<std::int64_t> security_delay;
  std::optional<std::int64_t> carrier_delay;
  std::optional<std::int64_t> late_aircraft_delay;

  bool operator==(const BtsRecord&) const = default;
};

struct BtsParseResult {
  std::vector<BtsRecord> records;
  std::uint64_t rejected{0};
  /// Data rows seen (records + rejected).
  std::uint64_t rows{0};
};

inline constexpr const char* kRequiredColumns[] = {
    "FL_DATE",        "OP_CARRIER", "OP_CARRIER_FL_NUM", "ORIGIN",         "ORIGIN_STATE_ABR",
    "DEST",           "DEP_DELAY",  "CANCELLED",         "WEATHER_DELAY",  "NAS_DELAY",
    "SECURITY_DELAY", "CARRIER_DELAY", "LATE_AIRCRAFT_DELAY",
};

/// Header-driven parse; extra columns are ignored. Rows that fail a type
/// check are counted in `rejected`. Throws HistError(kMissingColumn,
/// kEmptyFile, kIo).
BtsParseResult parse_bts_csv(const std::filesystem::path& path);
BtsParseResult parse_bts_csv_text(std::string_view text);

/// RFC 4180 fields of one logical record; quoted fields may span lines.
/// Advances `pos` past the record terminator. Returns false at end of input.
bool next_csv_record(std::string_view text, std::size_t& pos, std::vector<std::string>& fields);

}  // namespace skystream::histbatch
