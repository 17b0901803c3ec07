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

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "skystream/model/flight_position.hpp"

namespace skystream::sim {

/// Top-level payload is not `{"response": [...]}`.
class MalformedEnvelope : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ApiParseResult {
  std::vector<FlightPosition> positions;
  std::uint64_t dead_letter{0};
};

/// Parses one flight-API page. Bad entries are counted, never fatal.
ApiParseResult parse_api_response(std::string_view payload);

struct ApiClientOptions {
  /// Scheme, host and optional port, e.g. "https://airlabs.co".
  std::string base_url;
  std::string path{"/api/v9/flights"};
  std::string api_key;
  std::chrono::seconds timeout{10};
};

class ApiUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fetches one page from a live endpoint and parses it. The key is sent both
/// as a bearer token and as the `api_key` query parameter.
ApiParseResult fetch_api_page(const ApiClientOptions& options);

}  // namespace skystream::sim
