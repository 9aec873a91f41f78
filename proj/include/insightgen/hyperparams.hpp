#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace insightgen {

enum class NumClusterRule { CeilSqrtN, Explicit };
enum class ClusterMethod { KMeans, XMeans, GMeans, Hdbscan };
enum class ExpansionMode { Bfs, GlobalTopK };

std::string to_string(NumClusterRule rule);
NumClusterRule num_cluster_rule_from_string(const std::string& s);
std::string to_string(ClusterMethod method);
ClusterMethod cluster_method_from_string(const std::string& s);
std::string to_string(ExpansionMode mode);
ExpansionMode expansion_mode_from_string(const std::string& s);

struct HyperParams {
  int k = 5;                 // nearest clusters per expansion step
  int max_hops = 2;          // expansion depth
  NumClusterRule num_cluster_rule = NumClusterRule::CeilSqrtN;
  int explicit_num_clusters = 0;  // used when rule is Explicit
  std::uint64_t seed = 42;
  int chunk_budget = 2000;   // tokens per chunk
  int max_insights = 5;

  int resolve_num_clusters(std::size_t num_vectors) const;
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

nlohmann::json to_json(const HyperParams& params);
HyperParams hyperparams_from_json(const nlohmann::json& j);

}  // namespace insightgen
