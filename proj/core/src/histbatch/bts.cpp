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

#include "skystream/histbatch/bts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace skystream::histbatch {

std::string_view to_string(HistErrc code) {
  switch (code) {
    case HistErrc::kMissingColumn: return "MissingColumn";
    case HistErrc::kEmptyFile: return "EmptyFile";
    case HistErrc::kEmptyDataset: return "EmptyDataset";
    case HistErrc::kUnknownDimension: return "UnknownDimension";
    case HistErrc::kIo: return "IoFailure";
    case HistErrc::kMalformedSummary: return "MalformedSummary";
  }
  return "Unknown";
}

namespace {

constexpr bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

constexpr int days_in_month(int y, int m) {
  constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

// Days since 1970-01-01 (H. Hinnant's days_from_civil).
constexpr std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * static_cast<unsigned>(m > 2 ? m - 3 : m + 9) + 2) / 5 + static_cast<unsigned>(d) - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

template <typename T>
bool parse_int(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

enum class Parsed { kOk, kAbsent, kBad };

// Whole minutes; BTS writes them as decimals such as "-5.00".
Parsed parse_minutes(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return Parsed::kAbsent;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return Parsed::kBad;
  if (v != std::floor(v) || std::abs(v) > 1e12) return Parsed::kBad;
  out = static_cast<std::int64_t>(v);
  return Parsed::kOk;
}

bool parse_cause(std::string_view s, std::optional<std::int64_t>& out) {
  std::int64_t v = 0;
  switch (parse_minutes(s, v)) {
    case Parsed::kAbsent:
      out.reset();
      return true;
    case Parsed::kOk:
      if (v < 0) return false;
      out = v;
      return true;
    case Parsed::kBad:
      return false;
  }
  return false;
}

bool is_upper_alpha(std::string_view s) {
  for (char c : s) {
    if (c < 'A' || c > 'Z') return false;
  }
  return true;
}

}  // namespace

int CivilDate::weekday() const {
  const auto days = days_from_civil(year, month, day);
  // 1970-01-01 was a Thursday.
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

std::optional<CivilDate> parse_civil_date(std::string_view text) {
  text = trim(text);
  if (auto sp = text.find(' '); sp != std::string_view::npos) text = text.substr(0, sp);
  CivilDate d;
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    if (!parse_int(text.substr(0, 4), d.year) || !parse_int(text.substr(5, 2), d.month) ||
        !parse_int(text.substr(8, 2), d.day)) {
      return std::nullopt;
    }
  } else {
    const auto s1 = text.find('/');
    const auto s2 = s1 == std::string_view::npos ? s1 : text.find('/', s1 + 1);
    if (s2 == std::string_view::npos || s1 == 0 || s1 > 2 || s2 - s1 - 1 == 0 || s2 - s1 - 1 > 2 ||
        text.size() - s2 - 1 != 4) {
      return std::nullopt;
    }
    if (!parse_int(text.substr(0, s1), d.month) || !parse_int(text.substr(s1 + 1, s2 - s1 - 1), d.day) ||
        !parse_int(text.substr(s2 + 1), d.year)) {
      return std::nullopt;
    }
  }
  if (d.year < 1 || d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) {
    return std::nullopt;
  }
  return d;
}

bool next_csv_record(std::string_view text, std::size_t& pos, std::vector<std::string>& fields) {
  fields.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
      break;
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return true;
}

BtsParseResult parse_bts_csv_text(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::size_t pos = 0;
  std::vector<std::string> header;
  // Leading blank lines are tolerated.
  while (next_csv_record(text, pos, header)) {
    if (!(header.size() == 1 && trim(header[0]).empty())) break;
    header.clear();
  }
  if (header.empty()) throw HistError(HistErrc::kEmptyFile, "CSV has no header row");

  std::map<std::string, std::size_t, std::less<>> columns;
  for (std::size_t i = 0; i < header.size(); ++i) columns.emplace(std::string(trim(header[i])), i);
  std::size_t idx[std::size(kRequiredColumns)];
  std::size_t needed = 0;
  for (std::size_t i = 0; i < std::size(kRequiredColumns); ++i) {
    auto it = columns.find(kRequiredColumns[i]);
    if (it == columns.end()) {
      throw HistError(HistErrc::kMissingColumn, std::string("required column ") + kRequiredColumns[i] + " is missing");
    }
    idx[i] = it->second;
    needed = std::max(needed, it->second + 1);
  }

  BtsParseResult result;
  std::vector<std::string> row;
  while (next_csv_record(text, pos, row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    ++result.rows;
    if (row.size() < needed) {
      ++result.rejected;
      continue;
    }
    auto col = [&](std::size_t i) { return trim(row[idx[i]]); };

    BtsRecord r;
    bool ok = true;
    if (auto d = parse_civil_date(col(0))) {
      r.fl_date = *d;
    } else {
      ok = false;
    }
    r.carrier = std::string(col(1));
    r.fl_num = std::string(col(2));
    r.origin = std::string(col(3));
    r.origin_state = std::string(col(4));
    r.dest = std::string(col(5));
    ok = ok && !r.carrier.empty() && !r.fl_num.empty() && !r.origin.empty() && !r.dest.empty() &&
         r.origin_state.size() == 2 && is_upper_alpha(r.origin_state);

    std::int64_t cancelled = 0;
    ok = ok && parse_minutes(col(7), cancelled) == Parsed::kOk && (cancelled == 0 || cancelled == 1);
    r.cancelled = cancelled == 1;

    std::int64_t dep = 0;
    switch (parse_minutes(col(6), dep)) {
      case Parsed::kOk: r.dep_delay = dep; break;
      case Parsed::kAbsent: break;
      case Parsed::kBad: ok = false; break;
    }
    if (r.cancelled) r.dep_delay.reset();

    ok = ok && parse_cause(col(8), r.weather_delay) && parse_cause(col(9), r.nas_delay) &&
         parse_cause(col(10), r.security_delay) && parse_cause(col(11), r.carrier_delay) &&
         parse_cause(col(12), r.late_aircraft_delay);

    if (!ok) {
      ++result.rejected;
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

BtsParseResult parse_bts_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw HistError(HistErrc::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw HistError(HistErrc::kIo, "cannot read " + path.string());
  return parse_bts_csv_text(buf.str());
}

}  // namespace skystream::histbatch
