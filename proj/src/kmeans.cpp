#include "insightgen/kmeans.hpp"

#include <cmath>
#include <limits>

#include "insightgen/rng.hpp"

namespace insightgen {

namespace {

int nearest_row(const Eigen::RowVectorXd& p, const Eigen::MatrixXd& centroids,
                double* best_d2_out = nullptr) {
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
    const double d2 = (p - centroids.row(j)).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(j);
    }
  }
  if (best_d2_out) *best_d2_out = best_d2;
  return best;
}

// Assignment pass with deterministic empty-cluster repair: an empty cluster
// is reseated at the point farthest from its current centroid, preferring
// points whose donor cluster keeps at least one member.
double assign_with_repair(const Eigen::MatrixXd& pts, Eigen::MatrixXd& centroids,
                          std::vector<int>& assignment) {
  const Eigen::Index n = pts.rows();
  const Eigen::Index m = centroids.rows();
  assignment.resize(static_cast<std::size_t>(n));
  double inertia = 0.0;
  for (int round = 0; round <= static_cast<int>(m); ++round) {
    inertia = 0.0;
    std::vector<int> counts(static_cast<std::size_t>(m), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      double d2 = 0.0;
      const int j = nearest_row(pts.row(i), centroids, &d2);
      assignment[static_cast<std::size_t>(i)] = j;
      ++counts[static_cast<std::size_t>(j)];
      inertia += d2;
    }
    std::vector<int> empties;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (counts[static_cast<std::size_t>(j)] == 0) empties.push_back(static_cast<int>(j));
    }
    if (empties.empty()) break;
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (const int j : empties) {
      int pick = -1;
      double pick_d2 = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        const int owner = assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double d2 = (pts.row(i) - centroids.row(j)).squaredNorm();
        if (d2 > pick_d2) {
          pick_d2 = d2;
          pick = static_cast<int>(i);
        }
      }
      if (pick < 0) break;
      taken[static_cast<std::size_t>(pick)] = true;
      --counts[static_cast<std::size_t>(assignment[static_cast<std::size_t>(pick)])];
      ++counts[static_cast<std::size_t>(j)];
      centroids.row(j) = pts.row(pick);
      assignment[static_cast<std::size_t>(pick)] = j;
    }
  }
  return inertia;
}

Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& pts, int m, Rng& rng) {
  const Eigen::Index n = pts.rows();
  Eigen::MatrixXd centroids(m, pts.cols());
  const auto first = static_cast<Eigen::Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
  centroids.row(0) = pts.row(first);

  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2[i] = (pts.row(i) - centroids.row(0)).squaredNorm();
  }
  for (int t = 1; t < m; ++t) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double r = uniform_unit(rng) * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2[i];
        if (r < cum) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    }
    if (pick < 0) {
      pick = static_cast<Eigen::Index>(uniform_below(rng, static_cast<std::uint64_t>(n)));
    }
    centroids.row(t) = pts.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (pts.row(i) - centroids.row(t)).squaredNorm());
    }
  }
  return centroids;
}

}  // namespace

int default_num_clusters(std::size_t n) {
  require(n >= 1, ErrorCode::Contract, "default_num_clusters: empty input");
  std::size_t m = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (m * m < n) ++m;
  while (m > 1 && (m - 1) * (m - 1) >= n) --m;
  return static_cast<int>(m);
}

ClusterModel kmeans_fit(const Mat& points, int num_clusters, std::uint64_t seed,
                        int max_iter, double tol) {
  const Eigen::Index n = points.rows();
  require(n >= 1, ErrorCode::Contract, "kmeans_fit: no points");
  require(num_clusters >= 1 && num_clusters <= n, ErrorCode::Contract,
          "kmeans_fit: need 1 <= num_clusters <= num_points");
  require(max_iter >= 1, ErrorCode::Contract, "kmeans_fit: max_iter must be >= 1");

  const Eigen::MatrixXd pts = points.cast<double>();
  Rng rng(seed);
  Eigen::MatrixXd centroids = seed_centroids(pts, num_clusters, rng);

  ClusterModel model;
  std::vector<int> assignment;
  for (int iter = 0; iter < max_iter; ++iter) {
    const double inertia = assign_with_repair(pts, centroids, assignment);
    model.inertia_history.push_back(inertia);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(num_clusters, pts.cols());
    std::vector<std::int64_t> counts(static_cast<std::size_t>(num_clusters), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int j = assignment[static_cast<std::size_t>(i)];
      sums.row(j) += pts.row(i);
      ++counts[static_cast<std::size_t>(j)];
    }
    double shift = 0.0;
    for (int j = 0; j < num_clusters; ++j) {
      const Eigen::RowVectorXd updated =
          sums.row(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
      shift = std::max(shift, (updated - centroids.row(j)).norm());
      centroids.row(j) = updated;
    }
    if (shift < tol) break;
  }
  model.iterations = static_cast<int>(model.inertia_history.size());

  // Final assignment runs against the stored float32 centroids so that the
  // published assignment is an exact argmin over the published model.
  model.centroids = centroids.cast<float>();
  Eigen::MatrixXd stored = model.centroids.cast<double>();
  model.inertia = assign_with_repair(pts, stored, assignment);
  model.centroids = stored.cast<float>();
  model.assignment = std::move(assignment);
  return model;
}

int assign_nearest(const Vec& v, const Mat& centroids) {
  require(centroids.rows() >= 1, ErrorCode::Contract, "assign_nearest: no centroids");
  require(v.size() == centroids.cols(), ErrorCode::Contract,
          "assign_nearest: dimension mismatch");
  const Eigen::RowVectorXd p = v.transpose().cast<double>();
  const Eigen::MatrixXd c = centroids.cast<double>();
  return nearest_row(p, c);
}

}  // namespace insightgen
