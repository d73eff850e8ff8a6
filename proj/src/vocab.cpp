#include "arom/vocab.hpp"

#include <limits>
#include <string>

#include "arom/error.hpp"
#include "arom/rng.hpp"

namespace arom::vocab {

namespace {

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b,
                        Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double diff = a(i, c) - b(j, c);
    acc += diff * diff;
  }
  return acc;
}

struct Assignment {
  std::vector<Eigen::Index> cluster;
  std::vector<double> dist2;
  double inertia = 0.0;
};

Assignment assign_all(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids) {
  const auto n = points.rows();
  Assignment out;
  out.cluster.resize(static_cast<std::size_t>(n));
  out.dist2.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    double best_d = squared_distance(points, i, centroids, 0);
    for (Eigen::Index j = 1; j < centroids.rows(); ++j) {
      const double d = squared_distance(points, i, centroids, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    out.cluster[static_cast<std::size_t>(i)] = best;
    out.dist2[static_cast<std::size_t>(i)] = best_d;
    out.inertia += best_d;
  }
  return out;
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& points, Eigen::Index v, Rng& rng) {
  const auto n = points.rows();
  Eigen::MatrixXd centroids(v, points.cols());
  centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));

  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (Eigen::Index c = 1; c < v; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = nearest[static_cast<std::size_t>(i)];
      d = std::min(d, squared_distance(points, i, centroids, c - 1));
      total += d;
    }
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += nearest[static_cast<std::size_t>(i)];
        if (running > target) {
          pick = i;
          break;
        }
      }
    } else {
      // Fewer distinct points than clusters: duplicates are unavoidable.
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
  }
  return centroids;
}

}  // namespace

CentroidSet fit_kmeans(const Eigen::MatrixXd& points, Eigen::Index v, std::uint64_t seed,
                       const KMeansOptions& options) {
  const auto n = points.rows();
  if (v < 1) throw Error(ErrorCode::invalid_argument, "vocabulary size must be at least 1");
  if (n < v) {
    throw Error(ErrorCode::invalid_argument, "k-means needs at least as many points (" +
                                                 std::to_string(n) + ") as clusters (" +
                                                 std::to_string(v) + ")");
  }
  if (!(options.tol > 0)) throw Error(ErrorCode::invalid_argument, "k-means tol must be positive");
  if (options.max_iter < 0) throw Error(ErrorCode::invalid_argument, "max_iter must be non-negative");
  if (!points.allFinite()) throw Error(ErrorCode::non_finite, "k-means input has non-finite entries");

  Rng rng(seed);
  CentroidSet out;
  out.centroids = seed_plus_plus(points, v, rng);

  Assignment current = assign_all(points, out.centroids);
  out.inertia_trace.push_back(current.inertia);

  const auto dim = points.cols();
  for (int iter = 0; iter < options.max_iter; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(v, dim);
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(v), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto c = current.cluster[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }

    Eigen::MatrixXd next = out.centroids;
    std::vector<double> donor = current.dist2;
    for (Eigen::Index c = 0; c < v; ++c) {
      const auto count = counts[static_cast<std::size_t>(c)];
      if (count > 0) {
        next.row(c) = sums.row(c) / static_cast<double>(count);
        continue;
      }
      Eigen::Index far = 0;
      for (Eigen::Index i = 1; i < n; ++i) {
        if (donor[static_cast<std::size_t>(i)] > donor[static_cast<std::size_t>(far)]) far = i;
      }
      next.row(c) = points.row(far);
      donor[static_cast<std::size_t>(far)] = -1.0;
    }

    const double shift = (next - out.centroids).rowwise().norm().maxCoeff();
    out.centroids = std::move(next);
    out.iterations_run = iter + 1;
    current = assign_all(points, out.centroids);
    out.inertia_trace.push_back(current.inertia);
    if (shift < options.tol) break;
  }
  out.inertia = current.inertia;
  return out;
}

std::vector<Eigen::Index> assign(const Eigen::MatrixXd& points, const CentroidSet& set) {
  if (set.size() == 0) throw Error(ErrorCode::invalid_argument, "empty centroid set");
  if (points.cols() != set.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "point dimension " + std::to_string(points.cols()) +
                                                   " does not match centroid dimension " +
                                                   std::to_string(set.dim()));
  }
  return assign_all(points, set.centroids).cluster;
}

}  // namespace arom::vocab
