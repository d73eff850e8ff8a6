#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arom/feature_store.hpp"
#include "arom/numlin.hpp"

namespace arom {

struct ScatterPair {
  Eigen::MatrixXd s_w;
  Eigen::MatrixXd s_b;
  Eigen::MatrixXd class_means;  // C x D
  Eigen::VectorXd global_mean;
  std::vector<std::size_t> class_counts;

  std::size_t num_classes() const noexcept { return class_counts.size(); }
};

struct ScatterOptions {
  /// Sum raw scatter matrices (n_c - 1) * Sigma_c instead of the normalized
  /// class covariances.
  bool classical_scatter = false;
};

/// Class covariances (denominator n_c - 1), their sum S_W, and the
/// count-weighted between-class scatter S_B about the pooled sample mean.
/// Labels must cover 0..C-1 with at least two samples each.
ScatterPair compute_scatter(const Eigen::MatrixXd& encodings, const std::vector<Label>& labels,
                            const ScatterOptions& options = {});

enum class ClassCovarianceSource {
  reestimated,  // covariance of the projected exemplars of the class
  projected,    // W^T Sigma_c W from the full-space class covariance
};

struct DictionaryOptions {
  double ridge = numlin::kDefaultRidge;
  double shrinkage = 1e-4;
  std::optional<Eigen::Index> rank;  // automatic when empty
  bool classical_scatter = false;
  ClassCovarianceSource covariance_source = ClassCovarianceSource::reestimated;
};

/// Stage-2 concept dictionary: discriminant projection, every projected
/// training exemplar, and one inverse projected covariance per class.
struct ConceptDictionary {
  Eigen::MatrixXd lda;                 // D x r
  Eigen::VectorXd discriminant_values;  // r generalized eigenvalues, descending
  Eigen::MatrixXd exemplars;           // M x r
  std::vector<Label> exemplar_labels;  // length M
  std::vector<Eigen::MatrixXd> class_cov_inv;  // C matrices, r x r
  std::vector<std::size_t> class_counts;
  std::uint64_t language_fingerprint = 0;

  Eigen::Index input_dim() const noexcept { return lda.rows(); }
  Eigen::Index rank() const noexcept { return lda.cols(); }
  std::size_t num_classes() const noexcept { return class_cov_inv.size(); }
  std::size_t num_exemplars() const noexcept { return exemplar_labels.size(); }
};

ConceptDictionary fit_dictionary(const Eigen::MatrixXd& encodings, const std::vector<Label>& labels,
                                 const DictionaryOptions& options = {},
                                 std::uint64_t language_fingerprint = 0);

/// W_LDA^T s.
Eigen::VectorXd project(const ConceptDictionary& dict, const Eigen::VectorXd& s);

// ARDC container, little-endian:
//   magic "ARDC", version u16, D u32, r u32, C u32, M u32,
//   W_LDA[D x r] f64 row-major, discriminant_values[r] f64,
//   exemplars[M x r] f64 row-major, labels[M] u16,
//   C blocks of Sigma_c^{-1}[r x r] f64 row-major, language_fingerprint u64.
inline constexpr std::uint16_t kDictionaryFormatVersion = 1;

std::string serialize_dictionary(const ConceptDictionary& dict);
ConceptDictionary deserialize_dictionary(std::string_view bytes);
void save_dictionary(const ConceptDictionary& dict, const std::filesystem::path& path);
ConceptDictionary load_dictionary(const std::filesystem::path& path);

}  // namespace arom
