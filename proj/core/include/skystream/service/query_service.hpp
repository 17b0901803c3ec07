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

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "skystream/index/index.hpp"
#include "skystream/stream/actions.hpp"
#include "skystream/stream/pipeline.hpp"

namespace httplib {
class Server;
}

namespace skystream::service {

struct Response {
  int status{200};
  std::string body;
};

/// Every non-2xx body: {"status", "code", "message"}.
Response api_error(int status, std::string_view code, std::string_view message);

/// Exported DelaySummary documents by dataset id, served verbatim.
class DatasetRegistry {
 public:
  void put(std::string id, std::string summary_json);
  std::optional<std::string> get(std::string_view id) const;
  bool empty() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::string, std::less<>> datasets_;
};

struct ServiceOptions {
  stream::IndexNames indexes;
  std::size_t max_search_size{10'000};
  bool cors{true};
  std::string default_dataset{"default"};
};

struct LiveFilter {
  std::optional<index::GeoBBoxQuery> bbox;
  std::optional<FlightStatus> status;
  std::optional<std::string> airline;
};

/// Read-only request handlers. Each handler returns the status and JSON body
/// the HTTP layer sends unchanged.
class QueryService {
 public:
  QueryService(index::IndexStore& store, const stream::PipelineMetrics* metrics, const DatasetRegistry* datasets,
               ServiceOptions options = {});

  /// Query-string parameters as strings; absent parameters are nullopt.
  Response live_flights(std::optional<std::string_view> bbox, std::optional<std::string_view> status,
                        std::optional<std::string_view> airline) const;
  Response search(std::string_view body) const;
  Response metrics() const;
  Response delay_summary(std::optional<std::string_view> dataset) const;

  /// Parses "tl_lat,tl_lng,br_lat,br_lng". Throws BadRequest.
  static index::GeoBBoxQuery parse_bbox(std::string_view text);

  const ServiceOptions& options() const { return options_; }

 private:
  index::IndexStore& store_;
  const stream::PipelineMetrics* metrics_;
  const DatasetRegistry* datasets_;
  ServiceOptions options_;
};

/// Registers the four /api routes, JSON error handlers and, if enabled,
/// permissive CORS headers.
void mount_routes(httplib::Server& server, const QueryService& service);

}  // namespace skystream::service
