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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skystream/model/flight_position.hpp"

namespace skystream::index {

enum class FieldType { kString, kNumber, kTime, kGeoPoint };

std::string_view to_string(FieldType type);

/// One typed field value. Alternative order matches FieldType.
using FieldValue = std::variant<std::string, double, EventTime, GeoPoint>;

FieldType type_of(const FieldValue& value);

/// Field name to value; std::map keeps iteration (and serialization) stable.
using Document = std::map<std::string, FieldValue, std::less<>>;

struct IndexedDoc {
  std::string doc_id;
  std::uint64_t version{0};
  Document fields;

  bool operator==(const IndexedDoc&) const = default;
};

enum class IndexErrc {
  kUnknownIndex,
  kIndexExists,
  kMappingConflict,
  kMalformedQuery,
  kTypeMismatch,
  kCorruptSnapshot,
  kInvalidConfig,
  kIo,
};

std::string_view to_string(IndexErrc code);

class IndexError : public std::runtime_error {
 public:
  IndexError(IndexErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  IndexErrc code() const noexcept { return code_; }

 private:
  IndexErrc code_;
};

/// Keyword normalization applied to string terms: ASCII case-fold.
std::string fold_case(std::string_view text);

}  // namespace skystream::index
