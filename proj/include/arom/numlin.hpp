#pragma once

#include <Eigen/Dense>

namespace arom::numlin {

/// Eigenpairs sorted by descending eigenvalue; column i of `vectors` pairs
/// with `values[i]`. Columns are unit-norm and each column's largest-magnitude
/// entry is positive (first such entry on exact ties).
struct EigenDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;  // feature_dim x A, orthonormal columns
  Eigen::VectorXd explained_variance;

  Eigen::Index input_dim() const noexcept { return mean.size(); }
  Eigen::Index num_components() const noexcept { return components.cols(); }

  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  Eigen::VectorXd inverse_transform(const Eigen::VectorXd& a) const;
};

inline constexpr double kDefaultRidge = 1e-6;

/// Unbiased sample covariance (denominator n - 1) of the rows of `samples`.
Eigen::MatrixXd covariance(const Eigen::MatrixXd& samples);

Eigen::VectorXd column_means(const Eigen::MatrixXd& samples);

/// Throws Error{asymmetric} unless max|m - m^T| <= tol * max|m|.
void require_symmetric(const Eigen::MatrixXd& m, double tol = 1e-10);

EigenDecomposition eig_symmetric(const Eigen::MatrixXd& m);

/// Solves s_b w = lambda (s_w + ridge * tr(s_w)/d * I) w by Cholesky reduction
/// to a standard symmetric problem. Returned eigenvectors are rescaled to
/// unit Euclidean norm.
EigenDecomposition eig_generalized(const Eigen::MatrixXd& s_b, const Eigen::MatrixXd& s_w,
                                   double ridge = kDefaultRidge);

/// s_w with the trace-scaled ridge added to its diagonal.
Eigen::MatrixXd regularize(const Eigen::MatrixXd& s_w, double ridge);

Eigen::MatrixXd cholesky_inverse(const Eigen::MatrixXd& m);

PcaModel fit_pca(const Eigen::MatrixXd& samples, Eigen::Index num_components);

/// Flips each column so that its largest-magnitude entry is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors);

}  // namespace arom::numlin
