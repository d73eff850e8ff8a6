#include "arom/concepts.hpp"

#include <algorithm>
#include <cmath>

#include "arom/detail/binary_io.hpp"
#include "arom/error.hpp"

namespace arom {

namespace {

constexpr char kMagic[4] = {'A', 'R', 'D', 'C'};
constexpr double kRankThreshold = 1e-10;

void project_into(const Eigen::MatrixXd& lda, const double* s, double* out) {
  for (Eigen::Index j = 0; j < lda.cols(); ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lda.rows(); ++i) acc += lda(i, j) * s[i];
    out[j] = acc;
  }
}

std::vector<std::vector<Eigen::Index>> rows_by_class(const std::vector<Label>& labels,
                                                     std::size_t num_classes) {
  std::vector<std::vector<Eigen::Index>> rows(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    rows[labels[i]].push_back(static_cast<Eigen::Index>(i));
  }
  return rows;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

void check_labeled(const Eigen::MatrixXd& encodings, const std::vector<Label>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != encodings.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "label count " + std::to_string(labels.size()) +
                                                   " does not match encoding rows " +
                                                   std::to_string(encodings.rows()));
  }
  if (labels.empty()) throw Error(ErrorCode::invalid_argument, "no labeled encodings");
  if (!encodings.allFinite()) throw Error(ErrorCode::non_finite, "encodings contain non-finite entries");
}

}  // namespace

ScatterPair compute_scatter(const Eigen::MatrixXd& encodings, const std::vector<Label>& labels,
                            const ScatterOptions& options) {
  check_labeled(encodings, labels);
  const std::size_t num_classes = *std::max_element(labels.begin(), labels.end()) + 1u;
  const auto rows = rows_by_class(labels, num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (rows[c].size() < 2) {
      throw Error(ErrorCode::degenerate, "class " + std::to_string(c) + " has " +
                                             std::to_string(rows[c].size()) +
                                             " samples; at least 2 are required for its covariance");
    }
  }

  const auto dim = encodings.cols();
  ScatterPair out;
  out.global_mean = numlin::column_means(encodings);
  out.class_means.resize(static_cast<Eigen::Index>(num_classes), dim);
  out.s_w = Eigen::MatrixXd::Zero(dim, dim);
  out.s_b = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t c = 0; c < num_classes; ++c) {
    const Eigen::MatrixXd members = gather(encodings, rows[c]);
    const auto n_c = static_cast<double>(rows[c].size());
    const Eigen::VectorXd mean_c = numlin::column_means(members);
    out.class_means.row(static_cast<Eigen::Index>(c)) = mean_c.transpose();
    out.class_counts.push_back(rows[c].size());

    const Eigen::MatrixXd cov_c = numlin::covariance(members);
    out.s_w += options.classical_scatter ? Eigen::MatrixXd((n_c - 1.0) * cov_c) : cov_c;
    const Eigen::VectorXd delta = mean_c - out.global_mean;
    out.s_b += n_c * delta * delta.transpose();
  }
  out.s_b = 0.5 * (out.s_b + out.s_b.transpose());
  return out;
}

ConceptDictionary fit_dictionary(const Eigen::MatrixXd& encodings, const std::vector<Label>& labels,
                                 const DictionaryOptions& options, std::uint64_t language_fingerprint) {
  if (!(options.shrinkage >= 0) || !std::isfinite(options.shrinkage)) {
    throw Error(ErrorCode::invalid_argument, "shrinkage must be finite and non-negative");
  }
  const ScatterPair scatter =
      compute_scatter(encodings, labels, ScatterOptions{.classical_scatter = options.classical_scatter});
  const auto num_classes = scatter.num_classes();
  const auto dim = encodings.cols();

  const auto eig = numlin::eig_generalized(scatter.s_b, scatter.s_w, options.ridge);
  const double lambda_max = eig.values(0);
  Eigen::Index rank = 0;
  if (lambda_max > 0) {
    const auto cap = std::min<Eigen::Index>(static_cast<Eigen::Index>(num_classes) - 1, dim);
    while (rank < cap && eig.values(rank) > kRankThreshold * lambda_max) ++rank;
  }
  if (options.rank) {
    if (*options.rank < 1 || *options.rank > dim) {
      throw Error(ErrorCode::invalid_argument, "requested rank " + std::to_string(*options.rank) +
                                                   " outside [1, " + std::to_string(dim) + "]");
    }
    rank = *options.rank;
  }
  if (rank < 1) {
    throw Error(ErrorCode::degenerate, "between-class scatter has no discriminative direction");
  }

  ConceptDictionary dict;
  dict.lda = eig.vectors.leftCols(rank);
  dict.discriminant_values = eig.values.head(rank);
  dict.language_fingerprint = language_fingerprint;
  dict.class_counts = scatter.class_counts;
  dict.exemplar_labels = labels;

  const auto m = encodings.rows();
  dict.exemplars.resize(m, rank);
  Eigen::VectorXd s(dim);
  Eigen::VectorXd p(rank);
  for (Eigen::Index i = 0; i < m; ++i) {
    s = encodings.row(i).transpose();
    project_into(dict.lda, s.data(), p.data());
    dict.exemplars.row(i) = p.transpose();
  }

  const auto rows = rows_by_class(labels, num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    Eigen::MatrixXd cov;
    if (options.covariance_source == ClassCovarianceSource::reestimated) {
      cov = numlin::covariance(gather(dict.exemplars, rows[c]));
    } else {
      const Eigen::MatrixXd full = numlin::covariance(gather(encodings, rows[c]));
      cov = dict.lda.transpose() * full * dict.lda;
      cov = 0.5 * (cov + cov.transpose());
    }
    cov.diagonal().array() += options.shrinkage * cov.trace() / static_cast<double>(rank);
    try {
      dict.class_cov_inv.push_back(numlin::cholesky_inverse(cov));
    } catch (const Error&) {
      throw Error(ErrorCode::not_positive_definite,
                  "projected covariance of class " + std::to_string(c) +
                      " is not positive definite at shrinkage " + std::to_string(options.shrinkage) +
                      "; increase the shrinkage");
    }
  }
  return dict;
}

Eigen::VectorXd project(const ConceptDictionary& dict, const Eigen::VectorXd& s) {
  if (s.size() != dict.input_dim()) {
    throw Error(ErrorCode::dimension_mismatch, "encoding dimension " + std::to_string(s.size()) +
                                                   " does not match dictionary input " +
                                                   std::to_string(dict.input_dim()));
  }
  if (!s.allFinite()) throw Error(ErrorCode::non_finite, "encoding has non-finite entries");
  Eigen::VectorXd out(dict.rank());
  project_into(dict.lda, s.data(), out.data());
  return out;
}

std::string serialize_dictionary(const ConceptDictionary& dict) {
  const auto d = dict.input_dim();
  const auto r = dict.rank();
  const auto c = static_cast<Eigen::Index>(dict.num_classes());
  const auto m = static_cast<Eigen::Index>(dict.num_exemplars());
  if (dict.exemplars.rows() != m || dict.exemplars.cols() != r || dict.discriminant_values.size() != r) {
    throw Error(ErrorCode::dimension_mismatch, "inconsistent dictionary shapes");
  }
  detail::ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u16(kDictionaryFormatVersion);
  w.u32(static_cast<std::uint32_t>(d));
  w.u32(static_cast<std::uint32_t>(r));
  w.u32(static_cast<std::uint32_t>(c));
  w.u32(static_cast<std::uint32_t>(m));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) w.f64(dict.lda(i, j));
  }
  for (Eigen::Index j = 0; j < r; ++j) w.f64(dict.discriminant_values(j));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) w.f64(dict.exemplars(i, j));
  }
  for (auto l : dict.exemplar_labels) w.u16(l);
  for (const auto& inv : dict.class_cov_inv) {
    if (inv.rows() != r || inv.cols() != r) {
      throw Error(ErrorCode::dimension_mismatch, "class covariance inverse has wrong shape");
    }
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < r; ++j) w.f64(inv(i, j));
    }
  }
  w.u64(dict.language_fingerprint);
  return w.take();
}

ConceptDictionary deserialize_dictionary(std::string_view bytes) {
  detail::ByteReader rd(bytes);
  if (rd.remaining() < 4 || rd.bytes(4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::bad_magic, "not an ARDC dictionary file (bad magic)");
  }
  const auto version = rd.u16();
  if (version != kDictionaryFormatVersion) {
    throw Error(ErrorCode::version_mismatch, "unsupported ARDC version " + std::to_string(version));
  }
  const Eigen::Index d = rd.u32();
  const Eigen::Index r = rd.u32();
  const Eigen::Index c = rd.u32();
  const Eigen::Index m = rd.u32();
  if (d < 1 || r < 1 || c < 1 || m < 1) throw Error(ErrorCode::invalid_header, "invalid ARDC dimensions");
  const auto expected = static_cast<std::uint64_t>(d * r + r + m * r + c * r * r) * 8 +
                        static_cast<std::uint64_t>(m) * 2 + 8;
  if (rd.remaining() != expected) {
    throw Error(rd.remaining() < expected ? ErrorCode::truncated : ErrorCode::invalid_header,
                "ARDC payload size mismatch");
  }
  ConceptDictionary dict;
  dict.lda.resize(d, r);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) dict.lda(i, j) = rd.f64();
  }
  dict.discriminant_values.resize(r);
  for (Eigen::Index j = 0; j < r; ++j) dict.discriminant_values(j) = rd.f64();
  dict.exemplars.resize(m, r);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) dict.exemplars(i, j) = rd.f64();
  }
  dict.exemplar_labels.resize(static_cast<std::size_t>(m));
  dict.class_counts.assign(static_cast<std::size_t>(c), 0);
  for (auto& l : dict.exemplar_labels) {
    l = rd.u16();
    if (l >= c) throw Error(ErrorCode::invalid_header, "exemplar label out of range");
    ++dict.class_counts[l];
  }
  for (Eigen::Index k = 0; k < c; ++k) {
    Eigen::MatrixXd inv(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
      for (Eigen::Index j = 0; j < r; ++j) inv(i, j) = rd.f64();
    }
    dict.class_cov_inv.push_back(std::move(inv));
  }
  dict.language_fingerprint = rd.u64();
  return dict;
}

void save_dictionary(const ConceptDictionary& dict, const std::filesystem::path& path) {
  detail::write_file(path, serialize_dictionary(dict));
}

ConceptDictionary load_dictionary(const std::filesystem::path& path) {
  return deserialize_dictionary(detail::read_file(path));
}

}  // namespace arom
