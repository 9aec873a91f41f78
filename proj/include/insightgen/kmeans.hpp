#pragma once

#include <cstdint>
#include <vector>

#include "insightgen/embedding.hpp"

namespace insightgen {

struct ClusterModel {
  Mat centroids;                        // num_clusters x dim
  std::vector<int> assignment;          // point row -> cluster index
  double inertia = 0.0;                 // sum of squared distances to assigned centroids
  std::vector<double> inertia_history;  // one entry per Lloyd iteration
  int iterations = 0;

  int num_clusters() const { return static_cast<int>(centroids.rows()); }
};

// ceil(sqrt(n)) clusters by default.
int default_num_clusters(std::size_t n);

// Lloyd's algorithm with k-means++ seeding from a seeded generator.
// Distances and centroid updates accumulate in double; ties in the argmin
// go to the lower cluster index; an empty cluster is reseated at the point
// farthest from its current centroid. Bit-for-bit deterministic for fixed
// inputs and seed.
ClusterModel kmeans_fit(const Mat& points, int num_clusters, std::uint64_t seed,
                        int max_iter = 300, double tol = 1e-4);

// Index of the nearest centroid (Euclidean, tie to lower index).
int assign_nearest(const Vec& v, const Mat& centroids);

}  // namespace insightgen
