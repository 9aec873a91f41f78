#pragma once

#include <set>
#include <vector>

#include "insightgen/embedding.hpp"

namespace insightgen {

// Dense cluster-distance graph: symmetric Euclidean centroid distances with
// a zero diagonal, plus per-cluster neighbor lists sorted by ascending
// distance (ties to the lower index).
struct ThemeGraph {
  int num_clusters = 0;
  Eigen::MatrixXd dist;
  std::vector<std::vector<int>> neighbors;
};

ThemeGraph build_theme_graph(const Mat& centroids);

// Breadth-first neighborhood of the seed set. Each hop, every frontier
// member selects its k nearest clusters among those not yet visited at the
// start of the hop; the union of those selections is the next frontier.
// Returns all clusters reached within max_hops, never including seeds.
std::set<int> expand_neighborhood(const ThemeGraph& graph,
                                  const std::set<int>& seeds, int k,
                                  int max_hops);

}  // namespace insightgen
