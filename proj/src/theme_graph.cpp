#include "insightgen/theme_graph.hpp"

#include <algorithm>

namespace insightgen {

ThemeGraph build_theme_graph(const Mat& centroids) {
  const int m = static_cast<int>(centroids.rows());
  require(m >= 1, ErrorCode::Contract, "build_theme_graph: no centroids");
  ThemeGraph graph;
  graph.num_clusters = m;
  graph.dist = Eigen::MatrixXd::Zero(m, m);
  const Eigen::MatrixXd c = centroids.cast<double>();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double d = (c.row(i) - c.row(j)).norm();
      graph.dist(i, j) = d;
      graph.dist(j, i) = d;
    }
  }
  graph.neighbors.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto& nbrs = graph.neighbors[static_cast<std::size_t>(i)];
    nbrs.reserve(static_cast<std::size_t>(m - 1));
    for (int j = 0; j < m; ++j) {
      if (j != i) nbrs.push_back(j);
    }
    std::sort(nbrs.begin(), nbrs.end(), [&](int a, int b) {
      const double da = graph.dist(i, a);
      const double db = graph.dist(i, b);
      if (da != db) return da < db;
      return a < b;
    });
  }
  return graph;
}

std::set<int> expand_neighborhood(const ThemeGraph& graph,
                                  const std::set<int>& seeds, int k,
                                  int max_hops) {
  require(k >= 0, ErrorCode::Contract, "expand_neighborhood: k must be >= 0");
  require(max_hops >= 0, ErrorCode::Contract,
          "expand_neighborhood: max_hops must be >= 0");
  for (const int s : seeds) {
    require(s >= 0 && s < graph.num_clusters, ErrorCode::Contract,
            "expand_neighborhood: seed out of range");
  }
  std::set<int> visited = seeds;
  std::set<int> result;
  std::set<int> frontier = seeds;
  for (int hop = 0; hop < max_hops && !frontier.empty(); ++hop) {
    // Level-synchronous: every frontier member selects its k nearest
    // clusters among those unvisited at the start of the hop.
    std::set<int> next;
    for (const int c : frontier) {
      int taken = 0;
      for (const int nb : graph.neighbors[static_cast<std::size_t>(c)]) {
        if (taken == k) break;
        if (visited.count(nb)) continue;
        next.insert(nb);
        ++taken;
      }
    }
    for (const int c : next) {
      visited.insert(c);
      result.insert(c);
    }
    frontier = std::move(next);
  }
  return result;
}

}  // namespace insightgen
