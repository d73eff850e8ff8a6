#include "arom/feature_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>

#include "arom/detail/binary_io.hpp"
#include "arom/error.hpp"
#include "arom/rng.hpp"

namespace arom {

namespace {

constexpr char kMagic[4] = {'A', 'R', 'O', 'M'};
constexpr std::size_t kStringField = 32;

// Partial Fisher-Yates: keeps the first `keep` entries of a shuffled `pool`.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t keep, Rng& rng) {
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.index(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(keep);
}

}  // namespace

std::size_t FeatureSet::num_classes() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

void FeatureSet::validate() const {
  if (features.cols() <= 0) {
    throw Error(ErrorCode::invalid_argument, "feature_dim must be positive");
  }
  if (!labels.empty() && labels.size() != num_samples()) {
    throw Error(ErrorCode::invalid_argument,
                "label count " + std::to_string(labels.size()) + " does not match sample count " +
                    std::to_string(num_samples()));
  }
  if (!features.allFinite()) {
    throw Error(ErrorCode::non_finite, "feature matrix contains NaN or infinite entries");
  }
  if (backbone_id.size() > kStringField || source_dataset.size() > kStringField) {
    throw Error(ErrorCode::invalid_argument, "backbone_id and source_dataset are limited to 32 bytes");
  }
}

FeatureSet FeatureSet::select_rows(const std::vector<std::size_t>& rows) const {
  FeatureSet out;
  out.layer_index = layer_index;
  out.backbone_id = backbone_id;
  out.source_dataset = source_dataset;
  out.patch_count = patch_count;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= num_samples()) {
      throw Error(ErrorCode::invalid_argument, "row index " + std::to_string(rows[i]) + " out of range");
    }
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  }
  if (has_labels()) {
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(labels[r]);
  }
  return out;
}

FeatureSet FeatureSet::without_labels() const {
  FeatureSet out = *this;
  out.labels.clear();
  return out;
}

Eigen::MatrixXd FeatureSet::to_double() const { return features.cast<double>(); }

bool identical(const FeatureSet& a, const FeatureSet& b) {
  if (a.features.rows() != b.features.rows() || a.features.cols() != b.features.cols()) return false;
  const auto bytes = static_cast<std::size_t>(a.features.size()) * sizeof(float);
  return std::memcmp(a.features.data(), b.features.data(), bytes) == 0 && a.labels == b.labels &&
         a.layer_index == b.layer_index && a.backbone_id == b.backbone_id &&
         a.source_dataset == b.source_dataset && a.patch_count == b.patch_count;
}

void DatasetSplit::validate() const {
  train.validate();
  val.validate();
  test.validate();
  for (const FeatureSet* other : {&val, &test}) {
    if (other->feature_dim() != train.feature_dim() || other->layer_index != train.layer_index ||
        other->backbone_id != train.backbone_id) {
      throw Error(ErrorCode::dimension_mismatch,
                  "train/val/test splits disagree on feature_dim, layer_index or backbone_id");
    }
    if (!train.has_labels() || !other->has_labels()) continue;
    std::vector<bool> seen(train.num_classes(), false);
    for (auto l : train.labels) seen[l] = true;
    for (auto l : other->labels) {
      if (l >= seen.size() || !seen[l]) {
        throw Error(ErrorCode::invalid_argument,
                    "label " + std::to_string(l) + " appears in val/test but not in train");
      }
    }
  }
}

std::string encode_features(const FeatureSet& set) {
  set.validate();
  const auto n = set.num_samples();
  const auto d = set.feature_dim();
  detail::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u16(kFeatureFormatVersion);
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(d));
  w.u16(set.layer_index);
  w.u16(set.patch_count);
  w.fixed_string(set.backbone_id, kStringField);
  w.fixed_string(set.source_dataset, kStringField);
  w.u32(static_cast<std::uint32_t>(set.labels.size()));
  const float* data = set.features.data();
  for (std::size_t i = 0; i < n * d; ++i) w.f32(data[i]);
  for (auto l : set.labels) w.u16(l);
  return w.take();
}

FeatureSet decode_features(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (r.remaining() < 4 || r.bytes(4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::bad_magic, "not an AROM feature file (bad magic)");
  }
  const auto version = r.u16();
  if (version != kFeatureFormatVersion) {
    throw Error(ErrorCode::version_mismatch,
                "unsupported AROM version " + std::to_string(version) + " (expected " +
                    std::to_string(kFeatureFormatVersion) + ")");
  }
  if (r.remaining() < kFeatureHeaderBytes - 6) {
    throw Error(ErrorCode::truncated, "AROM header truncated");
  }
  const std::uint64_t n = r.u32();
  const std::uint64_t d = r.u32();
  FeatureSet set;
  set.layer_index = r.u16();
  set.patch_count = r.u16();
  set.backbone_id = r.fixed_string(kStringField);
  set.source_dataset = r.fixed_string(kStringField);
  const std::uint64_t label_count = r.u32();

  if (d == 0) throw Error(ErrorCode::invalid_header, "feature_dim is zero");
  const std::uint64_t payload = n * d * 4 + label_count * 2;
  if (r.remaining() < payload) {
    throw Error(ErrorCode::truncated, "payload truncated: header declares " + std::to_string(payload) +
                                          " bytes, file holds " + std::to_string(r.remaining()));
  }
  if (label_count != 0 && label_count != n) {
    throw Error(ErrorCode::invalid_header, "label_count " + std::to_string(label_count) +
                                               " is neither 0 nor num_samples " + std::to_string(n));
  }
  if (r.remaining() > payload) {
    throw Error(ErrorCode::invalid_header, "trailing bytes after declared payload");
  }

  set.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  float* data = set.features.data();
  for (std::uint64_t i = 0; i < n * d; ++i) {
    data[i] = r.f32();
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::non_finite, "non-finite value at row " + std::to_string(i / d) +
                                             ", column " + std::to_string(i % d));
    }
  }
  set.labels.resize(label_count);
  for (auto& l : set.labels) l = r.u16();
  return set;
}

void write_features(const FeatureSet& set, const std::filesystem::path& path) {
  detail::write_file(path, encode_features(set));
}

FeatureSet read_features(const std::filesystem::path& path) {
  return decode_features(detail::read_file(path));
}

std::filesystem::path sidecar_path(const std::filesystem::path& features_path) {
  auto p = features_path;
  p.replace_extension(".meta.json");
  return p;
}

void write_sidecar(const FeatureSidecar& meta, const std::filesystem::path& features_path) {
  nlohmann::json j;
  j["class_names"] = meta.class_names;
  j["extraction_timestamp"] = meta.extraction_timestamp;
  j["provenance"] = meta.provenance;
  detail::write_file(sidecar_path(features_path), j.dump(2) + "\n");
}

std::optional<FeatureSidecar> read_sidecar(const std::filesystem::path& features_path) {
  const auto path = sidecar_path(features_path);
  if (!std::filesystem::exists(path)) return std::nullopt;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io, "malformed sidecar '" + path.string() + "': " + e.what());
  }
  FeatureSidecar meta;
  meta.class_names = j.value("class_names", std::vector<std::string>{});
  meta.extraction_timestamp = j.value("extraction_timestamp", std::string{});
  meta.provenance = j.value("provenance", nlohmann::json{});
  return meta;
}

std::vector<std::size_t> subsample_indices(const std::vector<Label>& labels,
                                           std::size_t n_per_class, std::uint64_t seed) {
  if (labels.empty()) {
    throw Error(ErrorCode::invalid_argument, "per-class subsampling requires labels");
  }
  if (n_per_class < 1) {
    throw Error(ErrorCode::invalid_argument, "n_per_class must be at least 1");
  }
  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<std::size_t> selected;
  for (auto& [label, rows] : by_class) {
    if (rows.size() > n_per_class) partial_shuffle(rows, n_per_class, rng);
    selected.insert(selected.end(), rows.begin(), rows.end());
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

FeatureSet subsample_per_class(const FeatureSet& set, std::size_t n_per_class, std::uint64_t seed) {
  return set.select_rows(subsample_indices(set.labels, n_per_class, seed));
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap, std::uint64_t seed) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (n <= cap) return pool;
  Rng rng(seed);
  partial_shuffle(pool, cap, rng);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace arom
