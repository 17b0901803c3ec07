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
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "skystream/model/flight_position.hpp"
#include "skystream/util/crc32.hpp"

namespace skystream::log {

/// One record as stored in a segment file.
///
/// Frame layout, all integers big-endian:
///   length      u32   bytes following this field
///   offset      u64
///   timestamp   i64   epoch seconds
///   key_len     u32   0xFFFFFFFF when the key is absent
///   key         bytes
///   value_len   u32
///   value       bytes
///   crc32       u32   IEEE CRC over every preceding frame byte
struct LogRecord {
  std::int64_t offset{0};
  EventTime timestamp;
  std::optional<std::string> key;
  std::string value;
  std::uint32_t crc{0};

  bool operator==(const LogRecord&) const = default;
};

inline constexpr std::uint32_t kAbsentKey = 0xFFFFFFFFu;
inline constexpr std::size_t kLengthFieldBytes = 4;
/// offset + timestamp + key_len + value_len + crc
inline constexpr std::size_t kFixedBodyBytes = 8 + 8 + 4 + 4 + 4;

std::size_t frame_size(std::optional<std::string_view> key, std::string_view value);

/// Appends the encoded frame to `out` and returns its CRC.
std::uint32_t encode_frame(std::string& out, std::int64_t offset, EventTime timestamp,
                           std::optional<std::string_view> key, std::string_view value);

enum class DecodeStatus { kOk, kShort, kCorrupt };

struct DecodeResult {
  DecodeStatus status{DecodeStatus::kShort};
  LogRecord record;
  std::size_t bytes{0};
};

/// Decodes the frame starting at `bytes[0]`. kShort means the buffer ends
/// before the frame does; kCorrupt means the length or CRC is inconsistent.
DecodeResult decode_frame(std::string_view bytes);

}  // namespace skystream::log
