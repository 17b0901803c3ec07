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

#include <span>
#include <string>
#include <vector>

#include "skystream/index/document.hpp"
#include "skystream/stream/micro_batch.hpp"
#include "skystream/stream/window.hpp"

namespace skystream::stream {

struct IndexNames {
  std::string positions{"flights"};
  std::string windows{"flight-windows"};
};

/// One idempotent upsert.
struct IndexAction {
  std::string index;
  std::string doc_id;
  index::Document fields;

  bool operator==(const IndexAction&) const = default;
};

/// "<flight_icao>:<updated>"
std::string position_doc_id(const FlightPosition& position);
/// "win:<window_start>"
std::string window_doc_id(const WindowSnapshot& snapshot);

index::Document position_document(const FlightPosition& position);
/// Map counts flatten to status.<k>, airline.<k> and cell.<k> number fields.
index::Document window_document(const WindowSnapshot& snapshot);

/// Inverse of position_document. Throws ValidationError on a foreign document.
FlightPosition position_from_document(const index::Document& doc);

/// Position upserts (one per distinct doc_id, last record wins) followed by
/// one upsert per closed window.
std::vector<IndexAction> to_index_actions(const MicroBatch& batch, std::span<const WindowSnapshot> closed,
                                          const IndexNames& names = {});

}  // namespace skystream::stream
