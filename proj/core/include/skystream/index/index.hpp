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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "skystream/index/document.hpp"
#include "skystream/index/query.hpp"

namespace skystream::index {

struct IndexConfig {
  std::string name;
  /// 0 makes every upsert visible immediately; otherwise searches refresh
  /// once the interval has elapsed, or on an explicit refresh().
  int refresh_interval_seconds{0};
  /// Geohash length of the cell postings used to pre-filter geo_bbox.
  int geo_precision{4};

  void validate() const;
};

enum class SortOrder { kAsc, kDesc };

struct SortSpec {
  std::string field;
  SortOrder order{SortOrder::kAsc};
};

struct SearchResult {
  std::uint64_t total{0};
  std::vector<IndexedDoc> hits;
};

/// Hits and aggregations computed against one refresh view.
struct QueryResponse {
  SearchResult result;
  std::vector<AggregationResult> aggregations;
};

/// In-memory keyword index with columnar numeric storage.
///
/// Every upsert appends a new internal document and tombstones the previous
/// version. A refresh publishes a single sequence point; readers see exactly
/// the versions that were current at that point. One writer at a time,
/// any number of concurrent readers.
class Index {
 public:
  explicit Index(IndexConfig config);
  Index(const Index&) = delete;
  Index& operator=(const Index&) = delete;

  const IndexConfig& config() const { return config_; }

  /// Replaces any prior version. Returns the new version (1 for a new id).
  /// Throws IndexError(kMappingConflict) without modifying the index.
  std::uint64_t upsert(std::string_view doc_id, const Document& fields);

  void refresh();

  SearchResult search(const Query& query, std::size_t size = 10,
                      const std::optional<SortSpec>& sort = std::nullopt) const;

  AggregationResult aggregate(const Query& filter, const Aggregation& agg) const;

  /// search() plus every aggregation over the same hit set, under one view.
  QueryResponse query(const Query& query, std::size_t size, const std::optional<SortSpec>& sort,
                      const std::vector<Aggregation>& aggs) const;

  /// Visible document by id.
  std::optional<IndexedDoc> get(std::string_view doc_id) const;

  /// Visits every visible document matching `query`, in doc_id order.
  void scan(const Query& query, const std::function<void(const IndexedDoc&)>& visit) const;

  /// Live documents in the current view.
  std::uint64_t doc_count() const;

  std::optional<FieldType> field_type(std::string_view field) const;
  std::map<std::string, FieldType> mapping() const;

  /// Refreshes, then writes the live documents (tombstones dropped).
  void snapshot_to_disk(const std::filesystem::path& path);
  /// Throws IndexError(kCorruptSnapshot) on a bad magic, version or checksum.
  static std::unique_ptr<Index> load_from_disk(const std::filesystem::path& path, IndexConfig config);

 private:
  static constexpr std::uint32_t kLive = UINT32_MAX;

  struct StoredDoc {
    std::string doc_id;
    std::uint64_t version{0};
    std::vector<std::pair<std::uint16_t, FieldValue>> fields;
    std::uint32_t replaced_by{kLive};
  };

  struct FieldData {
    std::string name;
    FieldType type{FieldType::kString};
    std::unordered_map<std::string, std::vector<std::uint32_t>> postings;
    std::vector<double> numbers;     // NaN where absent
    std::vector<GeoPoint> points;    // NaN lat where absent
    std::map<std::string, std::vector<std::uint32_t>, std::less<>> cells;
  };

  using DocSet = std::vector<std::uint32_t>;

  std::uint64_t put_locked(std::string_view doc_id, const Document& fields, std::optional<std::uint64_t> version);
  void maybe_auto_refresh() const;

  bool visible(std::uint32_t docno, std::uint32_t view) const {
    return docno < view && (docs_[docno].replaced_by == kLive || docs_[docno].replaced_by >= view);
  }
  const FieldData* field(std::string_view name) const;
  const FieldValue* value_of(const StoredDoc& doc, std::uint16_t field_id) const;
  IndexedDoc materialize(std::uint32_t docno) const;

  DocSet evaluate(const Query& query, std::uint32_t view) const;
  DocSet all_visible(std::uint32_t view) const;
  DocSet filter_visible(const DocSet& candidates, std::uint32_t view) const;
  DocSet geo_candidates(const FieldData& f, const GeoBBoxQuery& q, std::uint32_t view) const;
  void order_hits(DocSet& ids, const std::optional<SortSpec>& sort) const;
  SearchResult collect_hits(DocSet ids, std::size_t size, const std::optional<SortSpec>& sort) const;
  AggregationResult aggregate_ids(const DocSet& ids, const Aggregation& agg) const;

  IndexConfig config_;

  mutable std::shared_mutex mu_;
  std::vector<StoredDoc> docs_;
  std::vector<FieldData> fields_;
  std::unordered_map<std::string, std::uint16_t> field_ids_;
  std::unordered_map<std::string, std::uint32_t> latest_;

  mutable std::atomic<std::uint32_t> view_{0};
  mutable std::atomic<std::int64_t> last_refresh_ns_{0};
};

/// Named indexes, optionally persisted under a directory as <name>.skix.
class IndexStore {
 public:
  IndexStore() = default;

  std::shared_ptr<Index> create(const IndexConfig& config);
  std::shared_ptr<Index> get_or_create(const IndexConfig& config);
  /// Throws IndexError(kUnknownIndex).
  std::shared_ptr<Index> get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  void snapshot_all(const std::filesystem::path& dir);
  /// Loads every <name>.skix under dir; existing names are replaced.
  void load_all(const std::filesystem::path& dir, int refresh_interval_seconds = 0, int geo_precision = 4);

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Index>, std::less<>> indexes_;
};

}  // namespace skystream::index
