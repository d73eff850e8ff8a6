#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace arom {

using FeatureMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Label = std::uint16_t;

/// Pooled backbone features for one (dataset, split, layer), optionally labeled.
struct FeatureSet {
  FeatureMatrix features;
  std::vector<Label> labels;  // empty for unlabeled (Stage-1) data
  std::uint16_t layer_index = 0;
  std::string backbone_id;
  std::string source_dataset;
  std::uint16_t patch_count = 0;

  std::size_t num_samples() const noexcept { return static_cast<std::size_t>(features.rows()); }
  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(features.cols()); }
  bool has_labels() const noexcept { return !labels.empty(); }
  /// One past the largest label; 0 when unlabeled.
  std::size_t num_classes() const;

  /// Throws Error if any invariant is violated.
  void validate() const;

  /// Subset of rows in the given order, metadata carried over.
  FeatureSet select_rows(const std::vector<std::size_t>& rows) const;
  FeatureSet without_labels() const;
  /// Features promoted to 64-bit.
  Eigen::MatrixXd to_double() const;
};

/// Bitwise comparison of payload and metadata.
bool identical(const FeatureSet& a, const FeatureSet& b);

struct DatasetSplit {
  FeatureSet train;
  FeatureSet val;
  FeatureSet test;

  void validate() const;
};

// AROM1 container. Header layout (little-endian, 86 bytes):
//   0  magic "AROM"          4  version u16 = 1      6  num_samples u32
//   10 feature_dim u32       14 layer_index u16      16 patch_count u16
//   18 backbone_id [32]      50 source_dataset [32]  82 label_count u32
// followed by num_samples*feature_dim f32 (row-major) and label_count u16.
inline constexpr std::uint16_t kFeatureFormatVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 86;

std::string encode_features(const FeatureSet& set);
FeatureSet decode_features(std::string_view bytes);

void write_features(const FeatureSet& set, const std::filesystem::path& path);
FeatureSet read_features(const std::filesystem::path& path);

/// Optional "<stem>.meta.json" sidecar.
struct FeatureSidecar {
  std::vector<std::string> class_names;
  std::string extraction_timestamp;
  nlohmann::json provenance;
};

std::filesystem::path sidecar_path(const std::filesystem::path& features_path);
void write_sidecar(const FeatureSidecar& meta, const std::filesystem::path& features_path);
std::optional<FeatureSidecar> read_sidecar(const std::filesystem::path& features_path);

/// Row indices (ascending) keeping at most `n_per_class` rows of every class.
/// Classes are visited in ascending label order with one generator seeded by
/// `seed`; an oversized class is reduced by a partial Fisher-Yates shuffle of
/// its row list, an undersized class is kept whole and consumes no draws.
std::vector<std::size_t> subsample_indices(const std::vector<Label>& labels,
                                           std::size_t n_per_class, std::uint64_t seed);

FeatureSet subsample_per_class(const FeatureSet& set, std::size_t n_per_class,
                               std::uint64_t seed);

/// Up to `cap` distinct indices from [0, n), ascending, via the same partial
/// Fisher-Yates scheme. Returns all of [0, n) when n <= cap.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t cap, std::uint64_t seed);

}  // namespace arom
