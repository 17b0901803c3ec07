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

#include "skystream/index/index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "skystream/index/geohash.hpp"
#include "skystream/util/crc32.hpp"

namespace skystream::index {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxCoverCells = 64;
constexpr char kSnapshotMagic[4] = {'S', 'K', 'I', 'X'};
constexpr std::uint16_t kSnapshotVersion = 1;

/// Exactly rounded floating-point sum (Shewchuk's partials), so aggregate
/// sums do not depend on document order.
class ExactSum {
 public:
  void add(double x) {
    std::size_t i = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[i++] = lo;
      x = hi;
    }
    partials_.resize(i);
    partials_.push_back(x);
  }

  double value() const {
    if (partials_.empty()) return 0.0;
    auto n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      lo = y - (hi - x);
      if (lo != 0.0) break;
    }
    // Round-half-even correction when the remaining partials share a sign.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
};

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::optional<double> as_number(const FieldValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* t = std::get_if<EventTime>(&v)) return static_cast<double>(t->seconds);
  return std::nullopt;
}

bool valid_index_name(std::string_view name) {
  return !name.empty() && name != "." && name != ".." && name.find_first_of("/\\") == std::string_view::npos;
}

std::vector<std::uint32_t> intersect(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint32_t> unite(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::uint32_t> subtract(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Big-endian helpers for the snapshot format.
void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }
void put_be(std::string& out, std::uint64_t v, int bytes) {
  for (int shift = (bytes - 1) * 8; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t be(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v = (v << 8) | static_cast<std::uint8_t>(data_[pos_++]);
    return v;
  }
  std::string_view take(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw IndexError(IndexErrc::kCorruptSnapshot, "snapshot truncated");
  }
  std::string_view data_;
  std::size_t pos_{0};
};

}  // namespace

void IndexConfig::validate() const {
  if (!valid_index_name(name)) throw IndexError(IndexErrc::kInvalidConfig, "invalid index name '" + name + "'");
  if (refresh_interval_seconds < 0) throw IndexError(IndexErrc::kInvalidConfig, "refresh_interval_seconds must be >= 0");
  if (geo_precision < 1 || geo_precision > kMaxGeohashPrecision) {
    throw IndexError(IndexErrc::kInvalidConfig, "geo_precision must be in [1, 12]");
  }
}

Index::Index(IndexConfig config) : config_(std::move(config)) {
  config_.validate();
  last_refresh_ns_ = now_ns();
}

std::uint64_t Index::upsert(std::string_view doc_id, const Document& fields) {
  std::unique_lock lock(mu_);
  return put_locked(doc_id, fields, std::nullopt);
}

std::uint64_t Index::put_locked(std::string_view doc_id, const Document& fields,
                                std::optional<std::uint64_t> version) {
  if (doc_id.empty()) throw IndexError(IndexErrc::kMalformedQuery, "doc_id must be non-empty");
  for (const auto& [name, value] : fields) {
    if (name.empty()) throw IndexError(IndexErrc::kMappingConflict, "field name must be non-empty");
    if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d)) {
      throw IndexError(IndexErrc::kMappingConflict, "field " + name + " holds a non-finite number");
    }
    if (const auto* p = std::get_if<GeoPoint>(&value); p && !is_valid_point(*p)) {
      throw IndexError(IndexErrc::kMappingConflict, "field " + name + " holds an invalid geo_point");
    }
    auto it = field_ids_.find(name);
    if (it != field_ids_.end() && fields_[it->second].type != type_of(value)) {
      throw IndexError(IndexErrc::kMappingConflict,
                       "field " + name + " is mapped as " + std::string(to_string(fields_[it->second].type)) +
                           ", got " + std::string(to_string(type_of(value))));
    }
  }
  if (docs_.size() >= kLive - 1) throw IndexError(IndexErrc::kInvalidConfig, "index is full");
  if (field_ids_.size() + fields.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw IndexError(IndexErrc::kInvalidConfig, "too many distinct fields");
  }

  const auto docno = static_cast<std::uint32_t>(docs_.size());
  StoredDoc doc;
  doc.doc_id = std::string(doc_id);
  auto prior = latest_.find(doc.doc_id);
  doc.version = version ? *version : (prior == latest_.end() ? 1 : docs_[prior->second].version + 1);

  doc.fields.reserve(fields.size());
  for (const auto& [name, value] : fields) {
    auto [it, inserted] = field_ids_.try_emplace(name, static_cast<std::uint16_t>(fields_.size()));
    if (inserted) {
      FieldData fd;
      fd.name = name;
      fd.type = type_of(value);
      fields_.push_back(std::move(fd));
    }
    auto& fd = fields_[it->second];
    switch (fd.type) {
      case FieldType::kString:
        fd.postings[fold_case(std::get<std::string>(value))].push_back(docno);
        break;
      case FieldType::kNumber:
      case FieldType::kTime:
        fd.numbers.resize(docno + 1, kNaN);
        fd.numbers[docno] = *as_number(value);
        break;
      case FieldType::kGeoPoint: {
        const auto& p = std::get<GeoPoint>(value);
        fd.points.resize(docno + 1, GeoPoint{kNaN, kNaN});
        fd.points[docno] = p;
        fd.cells[geohash_encode(p, config_.geo_precision)].push_back(docno);
        break;
      }
    }
    doc.fields.emplace_back(it->second, value);
  }

  if (prior != latest_.end()) {
    docs_[prior->second].replaced_by = docno;
    prior->second = docno;
  } else {
    latest_.emplace(doc.doc_id, docno);
  }
  const auto result = doc.version;
  docs_.push_back(std::move(doc));
  if (config_.refresh_interval_seconds == 0) view_.store(static_cast<std::uint32_t>(docs_.size()));
  return result;
}

void Index::refresh() {
  std::shared_lock lock(mu_);
  view_.store(static_cast<std::uint32_t>(docs_.size()));
  last_refresh_ns_ = now_ns();
}

void Index::maybe_auto_refresh() const {
  if (config_.refresh_interval_seconds <= 0) return;
  const auto interval_ns = static_cast<std::int64_t>(config_.refresh_interval_seconds) * 1'000'000'000;
  const auto now = now_ns();
  if (now - last_refresh_ns_.load() >= interval_ns) {
    view_.store(static_cast<std::uint32_t>(docs_.size()));
    last_refresh_ns_ = now;
  }
}

const Index::FieldData* Index::field(std::string_view name) const {
  auto it = field_ids_.find(std::string(name));
  return it == field_ids_.end() ? nullptr : &fields_[it->second];
}

const FieldValue* Index::value_of(const StoredDoc& doc, std::uint16_t field_id) const {
  for (const auto& [id, value] : doc.fields) {
    if (id == field_id) return &value;
  }
  return nullptr;
}

IndexedDoc Index::materialize(std::uint32_t docno) const {
  const auto& d = docs_[docno];
  IndexedDoc out;
  out.doc_id = d.doc_id;
  out.version = d.version;
  for (const auto& [id, value] : d.fields) out.fields.emplace(fields_[id].name, value);
  return out;
}

Index::DocSet Index::all_visible(std::uint32_t view) const {
  DocSet out;
  for (std::uint32_t d = 0; d < view; ++d) {
    if (visible(d, view)) out.push_back(d);
  }
  return out;
}

Index::DocSet Index::filter_visible(const DocSet& candidates, std::uint32_t view) const {
  DocSet out;
  for (auto d : candidates) {
    if (visible(d, view)) out.push_back(d);
  }
  return out;
}

Index::DocSet Index::geo_candidates(const FieldData& f, const GeoBBoxQuery& q, std::uint32_t view) const {
  // Split an antimeridian-crossing box into two ordinary boxes.
  std::vector<GeoBounds> boxes;
  if (q.top_left.lng <= q.bottom_right.lng) {
    boxes.push_back({q.bottom_right.lat, q.top_left.lat, q.top_left.lng, q.bottom_right.lng});
  } else {
    boxes.push_back({q.bottom_right.lat, q.top_left.lat, q.top_left.lng, 180.0});
    boxes.push_back({q.bottom_right.lat, q.top_left.lat, -180.0, q.bottom_right.lng});
  }

  // Finest cell length whose cover stays small; one cell of margin on each
  // side absorbs boundary rounding, the exact check below restores precision.
  std::vector<std::string> cover;
  for (int precision = config_.geo_precision; precision >= 1; --precision) {
    const int lng_bits = (5 * precision + 1) / 2;
    const int lat_bits = 5 * precision / 2;
    const double cell_w = 360.0 / std::ldexp(1.0, lng_bits);
    const double cell_h = 180.0 / std::ldexp(1.0, lat_bits);
    const auto max_i = static_cast<std::int64_t>(std::ldexp(1.0, lat_bits)) - 1;
    const auto max_j = static_cast<std::int64_t>(std::ldexp(1.0, lng_bits)) - 1;
    cover.clear();
    std::size_t count = 0;
    std::vector<std::array<std::int64_t, 4>> ranges;
    for (const auto& b : boxes) {
      const auto i0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((b.min_lat + 90.0) / cell_h)) - 1, 0, max_i);
      const auto i1 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((b.max_lat + 90.0) / cell_h)) + 1, 0, max_i);
      const auto j0 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((b.min_lng + 180.0) / cell_w)) - 1, 0, max_j);
      const auto j1 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((b.max_lng + 180.0) / cell_w)) + 1, 0, max_j);
      ranges.push_back({i0, i1, j0, j1});
      count += static_cast<std::size_t>((i1 - i0 + 1) * (j1 - j0 + 1));
    }
    if (count > kMaxCoverCells && precision > 1) continue;
    for (const auto& [i0, i1, j0, j1] : ranges) {
      for (auto i = i0; i <= i1; ++i) {
        for (auto j = j0; j <= j1; ++j) {
          const GeoPoint center{-90.0 + (static_cast<double>(i) + 0.5) * cell_h,
                                -180.0 + (static_cast<double>(j) + 0.5) * cell_w};
          cover.push_back(geohash_encode(center, precision));
        }
      }
    }
    break;
  }
  std::sort(cover.begin(), cover.end());
  cover.erase(std::unique(cover.begin(), cover.end()), cover.end());

  DocSet candidates;
  for (const auto& prefix : cover) {
    for (auto it = f.cells.lower_bound(prefix); it != f.cells.end() && it->first.starts_with(prefix); ++it) {
      candidates.insert(candidates.end(), it->second.begin(), it->second.end());
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  DocSet out;
  for (auto d : candidates) {
    if (visible(d, view) && d < f.points.size() && in_bbox(f.points[d], q)) out.push_back(d);
  }
  return out;
}

Index::DocSet Index::evaluate(const Query& query, std::uint32_t view) const {
  return std::visit(
      [&](const auto& q) -> DocSet {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, MatchAllQuery>) {
          return all_visible(view);
        } else if constexpr (std::is_same_v<T, TermQuery>) {
          const auto* f = field(q.field);
          if (!f) return {};
          if (const auto* s = std::get_if<std::string>(&q.value)) {
            if (f->type != FieldType::kString) return {};
            auto it = f->postings.find(fold_case(*s));
            return it == f->postings.end() ? DocSet{} : filter_visible(it->second, view);
          }
          if (f->type != FieldType::kNumber && f->type != FieldType::kTime) return {};
          const double target = std::get<double>(q.value);
          DocSet out;
          const auto n = std::min<std::size_t>(view, f->numbers.size());
          for (std::uint32_t d = 0; d < n; ++d) {
            if (f->numbers[d] == target && visible(d, view)) out.push_back(d);
          }
          return out;
        } else if constexpr (std::is_same_v<T, RangeQuery>) {
          const auto* f = field(q.field);
          if (!f || (f->type != FieldType::kNumber && f->type != FieldType::kTime)) return {};
          DocSet out;
          const auto n = std::min<std::size_t>(view, f->numbers.size());
          for (std::uint32_t d = 0; d < n; ++d) {
            const double v = f->numbers[d];
            if (!std::isnan(v) && in_range(v, q) && visible(d, view)) out.push_back(d);
          }
          return out;
        } else if constexpr (std::is_same_v<T, GeoBBoxQuery>) {
          const auto* f = field(q.field);
          if (!f || f->type != FieldType::kGeoPoint) return {};
          return geo_candidates(*f, q, view);
        } else {
          DocSet result;
          if (q.must.empty()) {
            result = all_visible(view);
          } else {
            result = evaluate(q.must.front(), view);
            for (std::size_t i = 1; i < q.must.size() && !result.empty(); ++i) {
              result = intersect(result, evaluate(q.must[i], view));
            }
          }
          if (!q.should.empty() && !result.empty()) {
            DocSet any;
            for (const auto& c : q.should) any = unite(any, evaluate(c, view));
            result = intersect(result, any);
          }
          for (const auto& c : q.must_not) {
            if (result.empty()) break;
            result = subtract(result, evaluate(c, view));
          }
          return result;
        }
      },
      query.node);
}

void Index::order_hits(DocSet& ids, const std::optional<SortSpec>& sort) const {
  if (!sort) {
    std::sort(ids.begin(), ids.end(),
              [this](auto a, auto b) { return docs_[a].doc_id < docs_[b].doc_id; });
    return;
  }
  const auto* f = field(sort->field);
  if (f && f->type == FieldType::kGeoPoint) {
    throw IndexError(IndexErrc::kMalformedQuery, "cannot sort on geo_point field " + sort->field);
  }
  const bool desc = sort->order == SortOrder::kDesc;
  const auto fid = f ? std::optional<std::uint16_t>(field_ids_.at(sort->field)) : std::nullopt;
  auto key_less = [&](std::uint32_t a, std::uint32_t b) {
    const FieldValue* va = fid ? value_of(docs_[a], *fid) : nullptr;
    const FieldValue* vb = fid ? value_of(docs_[b], *fid) : nullptr;
    if (va && vb) {
      if (f->type == FieldType::kString) {
        const auto& sa = std::get<std::string>(*va);
        const auto& sb = std::get<std::string>(*vb);
        if (sa != sb) return desc ? sa > sb : sa < sb;
      } else {
        const double na = *as_number(*va);
        const double nb = *as_number(*vb);
        if (na != nb) return desc ? na > nb : na < nb;
      }
    } else if (va || vb) {
      return va != nullptr;  // missing values sort last
    }
    return docs_[a].doc_id < docs_[b].doc_id;
  };
  std::sort(ids.begin(), ids.end(), key_less);
}

SearchResult Index::collect_hits(DocSet ids, std::size_t size, const std::optional<SortSpec>& sort) const {
  SearchResult result;
  result.total = ids.size();
  order_hits(ids, sort);
  const auto n = std::min(size, ids.size());
  result.hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) result.hits.push_back(materialize(ids[i]));
  return result;
}

SearchResult Index::search(const Query& query, std::size_t size, const std::optional<SortSpec>& sort) const {
  validate(query);
  std::shared_lock lock(mu_);
  maybe_auto_refresh();
  return collect_hits(evaluate(query, view_.load()), size, sort);
}

QueryResponse Index::query(const Query& query, std::size_t size, const std::optional<SortSpec>& sort,
                           const std::vector<Aggregation>& aggs) const {
  validate(query);
  for (const auto& a : aggs) validate(a);
  std::shared_lock lock(mu_);
  maybe_auto_refresh();
  auto ids = evaluate(query, view_.load());
  QueryResponse out;
  for (const auto& a : aggs) out.aggregations.push_back(aggregate_ids(ids, a));
  out.result = collect_hits(std::move(ids), size, sort);
  return out;
}

void Index::scan(const Query& query, const std::function<void(const IndexedDoc&)>& visit) const {
  validate(query);
  std::shared_lock lock(mu_);
  maybe_auto_refresh();
  auto ids = evaluate(query, view_.load());
  order_hits(ids, std::nullopt);
  for (auto d : ids) visit(materialize(d));
}

AggregationResult Index::aggregate(const Query& filter, const Aggregation& agg) const {
  validate(filter);
  validate(agg);
  std::shared_lock lock(mu_);
  maybe_auto_refresh();
  return aggregate_ids(evaluate(filter, view_.load()), agg);
}

AggregationResult Index::aggregate_ids(const DocSet& ids, const Aggregation& agg) const {
  auto mismatch = [](const std::string& name, FieldType type, std::string_view agg_name) {
    return IndexError(IndexErrc::kTypeMismatch, std::string(agg_name) + " is not defined on " +
                                                    std::string(to_string(type)) + " field " + name);
  };

  return std::visit(
      [&](const auto& a) -> AggregationResult {
        using T = std::decay_t<decltype(a)>;
        const auto* f = field(a.field);
        const auto fid = f ? field_ids_.at(a.field) : std::uint16_t{0};

        if constexpr (std::is_same_v<T, TermsAgg>) {
          TermsResult r;
          if (!f) return r;
          if (f->type == FieldType::kGeoPoint) throw mismatch(a.field, f->type, "terms");
          std::vector<TermsBucket> all;
          if (f->type == FieldType::kString) {
            std::map<std::string, std::uint64_t> counts;
            for (auto d : ids) {
              if (const auto* v = value_of(docs_[d], fid)) ++counts[fold_case(std::get<std::string>(*v))];
            }
            for (auto& [k, c] : counts) all.push_back({k, c});
          } else {
            std::map<double, std::uint64_t> counts;
            for (auto d : ids) {
              if (d < f->numbers.size() && !std::isnan(f->numbers[d])) ++counts[f->numbers[d]];
            }
            for (auto& [k, c] : counts) all.push_back({k, c});
          }
          // Keys arrive ascending, so a stable sort on count keeps the tie order.
          std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.count > y.count; });
          const auto k = std::min<std::size_t>(static_cast<std::size_t>(a.top_k), all.size());
          for (std::size_t i = k; i < all.size(); ++i) r.other_count += all[i].count;
          all.resize(k);
          r.buckets = std::move(all);
          return r;
        } else if constexpr (std::is_same_v<T, DateHistogramAgg>) {
          DateHistogramResult r;
          if (!f) return r;
          if (f->type != FieldType::kNumber && f->type != FieldType::kTime) {
            throw mismatch(a.field, f->type, "date_histogram");
          }
          std::map<std::int64_t, std::uint64_t> counts;
          for (auto d : ids) {
            if (d < f->numbers.size() && !std::isnan(f->numbers[d])) {
              const auto ts = static_cast<std::int64_t>(std::floor(f->numbers[d]));
              ++counts[bucket_start(ts, a.interval_seconds)];
            }
          }
          for (auto& [start, c] : counts) r.buckets.push_back({start, c});
          return r;
        } else if constexpr (std::is_same_v<T, StatsAgg>) {
          StatsResult r;
          if (!f) return r;
          if (f->type != FieldType::kNumber && f->type != FieldType::kTime) throw mismatch(a.field, f->type, "stats");
          ExactSum sum;
          for (auto d : ids) {
            if (d >= f->numbers.size() || std::isnan(f->numbers[d])) continue;
            const double v = f->numbers[d];
            ++r.count;
            r.min = r.min ? std::min(*r.min, v) : v;
            r.max = r.max ? std::max(*r.max, v) : v;
            sum.add(v);
          }
          r.sum = sum.value();
          if (r.count > 0) r.avg = r.sum / static_cast<double>(r.count);
          return r;
        } else {
          GeohashGridResult r;
          if (!f) return r;
          if (f->type != FieldType::kGeoPoint) throw mismatch(a.field, f->type, "geohash_grid");
          std::map<std::string, std::uint64_t> counts;
          for (auto d : ids) {
            if (d < f->points.size() && !std::isnan(f->points[d].lat)) {
              ++counts[geohash_encode(f->points[d], a.precision)];
            }
          }
          for (auto& [cell, c] : counts) r.buckets.push_back({cell, c});
          std::stable_sort(r.buckets.begin(), r.buckets.end(),
                           [](const auto& x, const auto& y) { return x.count > y.count; });
          return r;
        }
      },
      agg);
}

std::optional<IndexedDoc> Index::get(std::string_view doc_id) const {
  std::shared_lock lock(mu_);
  maybe_auto_refresh();
  const auto view = view_.load();
  auto it = latest_.find(std::string(doc_id));
  if (it == latest_.end()) return std::nullopt;
  // Walk back to the newest version inside the current view.
  for (auto d = it->second;;) {
    if (visible(d, view)) return materialize(d);
    std::optional<std::uint32_t> prev;
    for (std::uint32_t c = d; c-- > 0;) {
      if (docs_[c].replaced_by == d) {
        prev = c;
        break;
      }
    }
    if (!prev) return std::nullopt;
    d = *prev;
  }
}

std::uint64_t Index::doc_count() const {
  std::shared_lock lock(mu_);
  maybe_auto_refresh();
  const auto view = view_.load();
  std::uint64_t n = 0;
  for (std::uint32_t d = 0; d < view; ++d) n += visible(d, view) ? 1 : 0;
  return n;
}

std::optional<FieldType> Index::field_type(std::string_view name) const {
  std::shared_lock lock(mu_);
  const auto* f = field(name);
  return f ? std::optional(f->type) : std::nullopt;
}

std::map<std::string, FieldType> Index::mapping() const {
  std::shared_lock lock(mu_);
  std::map<std::string, FieldType> out;
  for (const auto& f : fields_) out.emplace(f.name, f.type);
  return out;
}

void Index::snapshot_to_disk(const fs::path& path) {
  refresh();
  std::string body;
  {
    std::shared_lock lock(mu_);
    std::vector<std::uint32_t> live;
    for (std::uint32_t d = 0; d < docs_.size(); ++d) {
      if (docs_[d].replaced_by == kLive) live.push_back(d);
    }
    std::sort(live.begin(), live.end(), [this](auto a, auto b) { return docs_[a].doc_id < docs_[b].doc_id; });

    put_be(body, live.size(), 8);
    std::string doc;
    for (auto d : live) {
      const auto& sd = docs_[d];
      doc.clear();
      put_be(doc, sd.doc_id.size(), 4);
      doc += sd.doc_id;
      put_be(doc, sd.version, 8);
      put_be(doc, sd.fields.size(), 4);
      auto named = materialize(d).fields;
      for (const auto& [name, value] : named) {
        put_be(doc, name.size(), 2);
        doc += name;
        put_u8(doc, static_cast<std::uint8_t>(value.index()));
        std::visit(
            [&doc](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, std::string>) {
                put_be(doc, v.size(), 4);
                doc += v;
              } else if constexpr (std::is_same_v<T, double>) {
                put_be(doc, std::bit_cast<std::uint64_t>(v), 8);
              } else if constexpr (std::is_same_v<T, EventTime>) {
                put_be(doc, static_cast<std::uint64_t>(v.seconds), 8);
              } else {
                put_be(doc, std::bit_cast<std::uint64_t>(v.lat), 8);
                put_be(doc, std::bit_cast<std::uint64_t>(v.lng), 8);
              }
            },
            value);
      }
      put_be(body, doc.size(), 4);
      body += doc;
    }
  }

  std::string file(kSnapshotMagic, sizeof kSnapshotMagic);
  put_be(file, kSnapshotVersion, 2);
  file += body;
  put_be(file, crc32_ieee(body), 4);

  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(file.data(), static_cast<std::streamsize>(file.size()));
    if (!out) throw IndexError(IndexErrc::kIo, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IndexError(IndexErrc::kIo, "rename " + tmp.string() + ": " + ec.message());
}

std::unique_ptr<Index> Index::load_from_disk(const fs::path& path, IndexConfig config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexError(IndexErrc::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string file = buf.str();

  constexpr std::size_t header = sizeof kSnapshotMagic + 2;
  if (file.size() < header + 8 + 4 || file.compare(0, 4, kSnapshotMagic, 4) != 0) {
    throw IndexError(IndexErrc::kCorruptSnapshot, "bad snapshot header in " + path.string());
  }
  Reader head(std::string_view(file).substr(4, 2));
  if (head.be(2) != kSnapshotVersion) {
    throw IndexError(IndexErrc::kCorruptSnapshot, "unsupported snapshot version in " + path.string());
  }
  const auto body = std::string_view(file).substr(header, file.size() - header - 4);
  Reader tail(std::string_view(file).substr(file.size() - 4));
  if (crc32_ieee(body) != tail.be(4)) {
    throw IndexError(IndexErrc::kCorruptSnapshot, "snapshot checksum mismatch in " + path.string());
  }

  auto index = std::make_unique<Index>(std::move(config));
  Reader r(body);
  const auto count = r.be(8);
  std::unique_lock lock(index->mu_);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.be(4);
    Reader d(r.take(len));
    const auto id = std::string(d.take(d.be(4)));
    const auto version = d.be(8);
    const auto nfields = d.be(4);
    Document fields;
    for (std::uint64_t k = 0; k < nfields; ++k) {
      auto name = std::string(d.take(d.be(2)));
      switch (d.be(1)) {
        case 0:
          fields.emplace(std::move(name), std::string(d.take(d.be(4))));
          break;
        case 1:
          fields.emplace(std::move(name), std::bit_cast<double>(d.be(8)));
          break;
        case 2:
          fields.emplace(std::move(name), EventTime{static_cast<std::int64_t>(d.be(8))});
          break;
        case 3: {
          const double lat = std::bit_cast<double>(d.be(8));
          const double lng = std::bit_cast<double>(d.be(8));
          fields.emplace(std::move(name), GeoPoint{lat, lng});
          break;
        }
        default:
          throw IndexError(IndexErrc::kCorruptSnapshot, "unknown field type tag");
      }
    }
    if (!d.done()) throw IndexError(IndexErrc::kCorruptSnapshot, "trailing bytes in document");
    try {
      index->put_locked(id, fields, version);
    } catch (const IndexError& e) {
      throw IndexError(IndexErrc::kCorruptSnapshot, std::string("invalid document in snapshot: ") + e.what());
    }
  }
  if (!r.done()) throw IndexError(IndexErrc::kCorruptSnapshot, "trailing bytes in snapshot");
  index->view_.store(static_cast<std::uint32_t>(index->docs_.size()));
  return index;
}

// ---------------------------------------------------------------------------
// IndexStore

std::shared_ptr<Index> IndexStore::create(const IndexConfig& config) {
  config.validate();
  std::unique_lock lock(mu_);
  if (indexes_.contains(config.name)) {
    throw IndexError(IndexErrc::kIndexExists, "index " + config.name + " already exists");
  }
  auto idx = std::make_shared<Index>(config);
  indexes_.emplace(config.name, idx);
  return idx;
}

std::shared_ptr<Index> IndexStore::get_or_create(const IndexConfig& config) {
  config.validate();
  std::unique_lock lock(mu_);
  auto it = indexes_.find(config.name);
  if (it != indexes_.end()) return it->second;
  auto idx = std::make_shared<Index>(config);
  indexes_.emplace(config.name, idx);
  return idx;
}

std::shared_ptr<Index> IndexStore::get(std::string_view name) const {
  std::shared_lock lock(mu_);
  auto it = indexes_.find(name);
  if (it == indexes_.end()) throw IndexError(IndexErrc::kUnknownIndex, "unknown index " + std::string(name));
  return it->second;
}

bool IndexStore::contains(std::string_view name) const {
  std::shared_lock lock(mu_);
  return indexes_.find(name) != indexes_.end();
}

std::vector<std::string> IndexStore::names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, _] : indexes_) out.push_back(name);
  return out;
}

void IndexStore::snapshot_all(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::pair<std::string, std::shared_ptr<Index>>> all;
  {
    std::shared_lock lock(mu_);
    all.assign(indexes_.begin(), indexes_.end());
  }
  for (auto& [name, idx] : all) idx->snapshot_to_disk(dir / (name + ".skix"));
}

void IndexStore::load_all(const fs::path& dir, int refresh_interval_seconds, int geo_precision) {
  if (!fs::exists(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".skix") continue;
    IndexConfig cfg{entry.path().stem().string(), refresh_interval_seconds, geo_precision};
    std::shared_ptr<Index> idx = Index::load_from_disk(entry.path(), cfg);
    std::unique_lock lock(mu_);
    indexes_[cfg.name] = std::move(idx);
  }
}

}  // namespace skystream::index
