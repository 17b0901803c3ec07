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

#include "skystream/log/frame.hpp"

#include <limits>

namespace skystream::log {
namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<std::uint8_t>(b[at + i]);
  return v;
}

std::uint64_t get_u64(std::string_view b, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | static_cast<std::uint8_t>(b[at + i]);
  return v;
}

// Upper bound on a single frame body; anything larger is a torn length field.
constexpr std::uint64_t kMaxFrameBody = std::numeric_limits<std::uint32_t>::max() - 1;

}  // namespace

std::size_t frame_size(std::optional<std::string_view> key, std::string_view value) {
  return kLengthFieldBytes + kFixedBodyBytes + (key ? key->size() : 0) + value.size();
}

std::uint32_t encode_frame(std::string& out, std::int64_t offset, EventTime timestamp,
                           std::optional<std::string_view> key, std::string_view value) {
  const std::size_t start = out.size();
  const std::size_t total = frame_size(key, value);
  out.reserve(start + total);
  put_u32(out, static_cast<std::uint32_t>(total - kLengthFieldBytes));
  put_u64(out, static_cast<std::uint64_t>(offset));
  put_u64(out, static_cast<std::uint64_t>(timestamp.seconds));
  if (key) {
    put_u32(out, static_cast<std::uint32_t>(key->size()));
    out.append(*key);
  } else {
    put_u32(out, kAbsentKey);
  }
  put_u32(out, static_cast<std::uint32_t>(value.size()));
  out.append(value);
  const auto crc = crc32_ieee(std::string_view(out).substr(start));
  put_u32(out, crc);
  return crc;
}

DecodeResult decode_frame(std::string_view bytes) {
  DecodeResult r;
  if (bytes.size() < kLengthFieldBytes) return r;
  const std::uint64_t body = get_u32(bytes, 0);
  if (body < kFixedBodyBytes || body > kMaxFrameBody) {
    r.status = DecodeStatus::kCorrupt;
    return r;
  }
  const std::size_t total = kLengthFieldBytes + body;
  if (bytes.size() < total) return r;
  const auto frame = bytes.substr(0, total);

  std::size_t at = kLengthFieldBytes;
  r.record.offset = static_cast<std::int64_t>(get_u64(frame, at));
  at += 8;
  r.record.timestamp = EventTime{static_cast<std::int64_t>(get_u64(frame, at))};
  at += 8;
  const std::uint32_t key_len = get_u32(frame, at);
  at += 4;
  if (key_len != kAbsentKey) {
    if (at + key_len + 8 > total) {
      r.status = DecodeStatus::kCorrupt;
      return r;
    }
    r.record.key = std::string(frame.substr(at, key_len));
    at += key_len;
  }
  const std::uint32_t value_len = get_u32(frame, at);
  at += 4;
  if (at + value_len + 4 != total) {
    r.status = DecodeStatus::kCorrupt;
    return r;
  }
  r.record.value = std::string(frame.substr(at, value_len));
  at += value_len;
  r.record.crc = get_u32(frame, at);
  if (crc32_ieee(frame.substr(0, at)) != r.record.crc) {
    r.status = DecodeStatus::kCorrupt;
    return r;
  }
  r.status = DecodeStatus::kOk;
  r.bytes = total;
  return r;
}

}  // namespace skystream::log
