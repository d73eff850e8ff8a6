#include "arom/numlin.hpp"

#include <cmath>
#include <string>

#include "arom/error.hpp"

namespace arom::numlin {

namespace {

void require_square(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::dimension_mismatch, std::string(what) + " must be a non-empty square matrix");
  }
}

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::non_finite, std::string(what) + " has non-finite entries");
}

// Descending order with normalized, sign-fixed columns.
EigenDecomposition descending(const Eigen::VectorXd& ascending_values,
                              const Eigen::MatrixXd& ascending_vectors) {
  const auto n = ascending_values.size();
  EigenDecomposition out;
  out.values = ascending_values.reverse();
  out.vectors = ascending_vectors.rowwise().reverse();
  for (Eigen::Index j = 0; j < n; ++j) out.vectors.col(j).normalize();
  canonicalize_signs(out.vectors);
  return out;
}

}  // namespace

Eigen::VectorXd PcaModel::transform(const Eigen::VectorXd& x) const {
  return components.transpose() * (x - mean);
}

Eigen::VectorXd PcaModel::inverse_transform(const Eigen::VectorXd& a) const {
  return components * a + mean;
}

Eigen::VectorXd column_means(const Eigen::MatrixXd& samples) {
  return samples.colwise().mean().transpose();
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2) {
    throw Error(ErrorCode::degenerate, "covariance needs at least 2 samples, got " +
                                           std::to_string(samples.rows()));
  }
  require_finite(samples, "samples");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Eigen::MatrixXd centered = samples.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered;
  cov /= static_cast<double>(samples.rows() - 1);
  return 0.5 * (cov + cov.transpose());
}

void require_symmetric(const Eigen::MatrixXd& m, double tol) {
  require_square(m, "matrix");
  const double scale = m.cwiseAbs().maxCoeff();
  const double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (skew > tol * scale) {
    throw Error(ErrorCode::asymmetric, "matrix is not symmetric (max |m - m^T| = " +
                                           std::to_string(skew) + ")");
  }
}

void canonicalize_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, j)) > std::abs(vectors(pivot, j))) pivot = i;
    }
    if (vectors(pivot, j) < 0) vectors.col(j) = -vectors.col(j);
  }
}

EigenDecomposition eig_symmetric(const Eigen::MatrixXd& m) {
  require_square(m, "eig_symmetric input");
  require_finite(m, "eig_symmetric input");
  require_symmetric(m);
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::degenerate, "symmetric eigensolver did not converge");
  }
  return descending(solver.eigenvalues(), solver.eigenvectors());
}

Eigen::MatrixXd regularize(const Eigen::MatrixXd& s_w, double ridge) {
  if (ridge < 0 || !std::isfinite(ridge)) {
    throw Error(ErrorCode::invalid_argument, "ridge must be finite and non-negative");
  }
  const auto d = s_w.rows();
  Eigen::MatrixXd reg = s_w;
  reg.diagonal().array() += ridge * s_w.trace() / static_cast<double>(d);
  return reg;
}

EigenDecomposition eig_generalized(const Eigen::MatrixXd& s_b, const Eigen::MatrixXd& s_w,
                                   double ridge) {
  require_square(s_b, "s_b");
  require_square(s_w, "s_w");
  if (s_b.rows() != s_w.rows()) {
    throw Error(ErrorCode::dimension_mismatch, "s_b and s_w must have the same shape");
  }
  require_finite(s_b, "s_b");
  require_finite(s_w, "s_w");
  require_symmetric(s_b);
  require_symmetric(s_w);

  const Eigen::MatrixXd reg = regularize(0.5 * (s_w + s_w.transpose()), ridge);
  Eigen::LLT<Eigen::MatrixXd> llt(reg);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::not_positive_definite,
                "regularized within-class scatter is not positive definite at ridge " +
                    std::to_string(ridge) + "; increase the ridge");
  }
  const auto lower = llt.matrixL();
  // C = L^{-1} s_b L^{-T}
  const Eigen::MatrixXd half = lower.solve(0.5 * (s_b + s_b.transpose()));
  Eigen::MatrixXd c = lower.solve(half.transpose());
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::degenerate, "generalized eigensolver did not converge");
  }
  // w = L^{-T} u
  const Eigen::MatrixXd w = llt.matrixU().solve(solver.eigenvectors());
  return descending(solver.eigenvalues(), w);
}

Eigen::MatrixXd cholesky_inverse(const Eigen::MatrixXd& m) {
  require_square(m, "cholesky_inverse input");
  require_finite(m, "cholesky_inverse input");
  require_symmetric(m);
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::not_positive_definite, "matrix is not positive definite");
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

PcaModel fit_pca(const Eigen::MatrixXd& samples, Eigen::Index num_components) {
  const auto n = samples.rows();
  const auto d = samples.cols();
  if (n < 2) {
    throw Error(ErrorCode::degenerate, "PCA needs at least 2 samples");
  }
  if (num_components < 1 || num_components > std::min(n - 1, d)) {
    throw Error(ErrorCode::invalid_argument,
                "num_components " + std::to_string(num_components) + " outside [1, min(n-1, d)] = [1, " +
                    std::to_string(std::min(n - 1, d)) + "]");
  }
  PcaModel model;
  model.mean = column_means(samples);
  const auto eig = eig_symmetric(covariance(samples));
  model.components = eig.vectors.leftCols(num_components);
  model.explained_variance = eig.values.head(num_components).cwiseMax(0.0);
  return model;
}

}  // namespace arom::numlin
