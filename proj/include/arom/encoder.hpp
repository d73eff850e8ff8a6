#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arom/feature_store.hpp"
#include "arom/numlin.hpp"
#include "arom/vocab.hpp"

namespace arom {

/// Frozen Stage-1 model: the PCA "alphabet" and the k-means "vocabulary"
/// living in alphabet space.
struct EncodingLanguage {
  numlin::PcaModel pca;
  vocab::CentroidSet vocabulary;
  std::uint32_t feature_dim = 0;
  std::uint16_t layer_index = 0;
  /// Divide each alphabet coordinate by the square root of its explained
  /// variance before quantization and encoding. Off by default.
  bool whiten = false;

  Eigen::Index alphabet_size() const noexcept { return pca.num_components(); }
  Eigen::Index vocab_size() const noexcept { return vocabulary.size(); }
  Eigen::Index encoding_dim() const noexcept { return alphabet_size() + vocab_size(); }

  /// FNV-1a of the serialized language; binds dictionaries to their language.
  std::uint64_t fingerprint() const;
};

struct FullEncoding {
  Eigen::VectorXd alphabet;
  Eigen::VectorXd word;

  /// alphabet followed by word.
  Eigen::VectorXd combined() const;
};

struct LanguageOptions {
  vocab::KMeansOptions kmeans;
  bool whiten = false;
};

EncodingLanguage fit_language(const FeatureSet& unlabeled, Eigen::Index a_size, Eigen::Index v_size,
                              std::uint64_t seed, const LanguageOptions& options = {});

FullEncoding encode(const EncodingLanguage& lang, const Eigen::VectorXd& z);

struct EncodedBatch {
  Eigen::MatrixXd encodings;  // n x (A + V)
  std::vector<Label> labels;
};

/// Row i equals encode(lang, row i).combined() exactly.
EncodedBatch encode_batch(const EncodingLanguage& lang, const FeatureSet& set);

// ARLG container, little-endian:
//   magic "ARLG", version u16, flags u16 (bit 0: whiten), A u32, V u32,
//   feature_dim u32, layer_index u16, kmeans iterations u32, inertia f64,
//   then f64 arrays: mean[d], components[d x A] row-major,
//   explained_variance[A], centroids[V x A] row-major.
inline constexpr std::uint16_t kLanguageFormatVersion = 1;

std::string serialize_language(const EncodingLanguage& lang);
EncodingLanguage deserialize_language(std::string_view bytes);
void save_language(const EncodingLanguage& lang, const std::filesystem::path& path);
EncodingLanguage load_language(const std::filesystem::path& path);

}  // namespace arom
