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

#include "skystream/sim/api_adapter.hpp"

#include <httplib.h>

namespace skystream::sim {

ApiParseResult parse_api_response(std::string_view payload) {
  nlohmann::json doc = nlohmann::json::parse(payload, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw MalformedEnvelope("payload is not valid JSON");
  if (!doc.is_object()) throw MalformedEnvelope("payload is not a JSON object");
  auto it = doc.find("response");
  if (it == doc.end() || !it->is_array()) throw MalformedEnvelope("missing response array");

  ApiParseResult result;
  result.positions.reserve(it->size());
  for (const auto& entry : *it) {
    try {
      result.positions.push_back(validate_position(entry));
    } catch (const ValidationError&) {
      ++result.dead_letter;
    }
  }
  return result;
}

ApiParseResult fetch_api_page(const ApiClientOptions& options) {
  httplib::Client client(options.base_url);
  client.set_connection_timeout(options.timeout);
  client.set_read_timeout(options.timeout);
  httplib::Headers headers;
  if (!options.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options.api_key);
  }
  httplib::Params params;
  if (!options.api_key.empty()) params.emplace("api_key", options.api_key);

  auto res = client.Get(options.path, params, headers);
  if (!res) {
    throw ApiUnavailable("flight API request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ApiUnavailable("flight API returned HTTP " + std::to_string(res->status));
  }
  return parse_api_response(res->body);
}

}  // namespace skystream::sim
