#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace arom::vocab {

struct CentroidSet {
  Eigen::MatrixXd centroids;  // V x A
  double inertia = 0.0;
  int iterations_run = 0;
  /// Inertia of every assignment step; entry 0 is the k-means++ seeding.
  std::vector<double> inertia_trace;

  Eigen::Index size() const noexcept { return centroids.rows(); }
  Eigen::Index dim() const noexcept { return centroids.cols(); }
};

struct KMeansOptions {
  int max_iter = 300;
  double tol = 1e-6;  // max centroid shift
};

/// k-means++ seeding followed by Lloyd iterations. Empty clusters are moved
/// to the point farthest from its currently assigned centroid.
CentroidSet fit_kmeans(const Eigen::MatrixXd& points, Eigen::Index v, std::uint64_t seed,
                       const KMeansOptions& options = {});

/// Nearest centroid per row; ties go to the smaller index.
std::vector<Eigen::Index> assign(const Eigen::MatrixXd& points, const CentroidSet& set);

}  // namespace arom::vocab
