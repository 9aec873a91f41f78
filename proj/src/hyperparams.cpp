#include "insightgen/hyperparams.hpp"

#include <algorithm>

#include "insightgen/errors.hpp"
#include "insightgen/kmeans.hpp"

namespace insightgen {

std::string to_string(NumClusterRule rule) {
  return rule == NumClusterRule::CeilSqrtN ? "ceil_sqrt_n" : "explicit";
}

NumClusterRule num_cluster_rule_from_string(const std::string& s) {
  if (s == "ceil_sqrt_n") return NumClusterRule::CeilSqrtN;
  if (s == "explicit") return NumClusterRule::Explicit;
  raise(ErrorCode::Config, "unknown num_cluster rule: " + s);
}

std::string to_string(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::KMeans: return "kmeans";
    case ClusterMethod::XMeans: return "xmeans";
    case ClusterMethod::GMeans: return "gmeans";
    case ClusterMethod::Hdbscan: return "hdbscan";
  }
  return "kmeans";
}

ClusterMethod cluster_method_from_string(const std::string& s) {
  if (s == "kmeans") return ClusterMethod::KMeans;
  if (s == "xmeans") return ClusterMethod::XMeans;
  if (s == "gmeans") return ClusterMethod::GMeans;
  if (s == "hdbscan") return ClusterMethod::Hdbscan;
  raise(ErrorCode::Config, "unknown cluster method: " + s);
}

std::string to_string(ExpansionMode mode) {
  return mode == ExpansionMode::Bfs ? "bfs" : "global_topk";
}

ExpansionMode expansion_mode_from_string(const std::string& s) {
  if (s == "bfs") return ExpansionMode::Bfs;
  if (s == "global_topk") return ExpansionMode::GlobalTopK;
  raise(ErrorCode::Config, "unknown expansion mode: " + s);
}

int HyperParams::resolve_num_clusters(std::size_t num_vectors) const {
  require(num_vectors >= 1, ErrorCode::Contract, "resolve_num_clusters: no vectors");
  if (num_cluster_rule == NumClusterRule::Explicit) {
    require(explicit_num_clusters >= 1, ErrorCode::Config,
            "explicit cluster count must be >= 1");
    return std::min<int>(explicit_num_clusters, static_cast<int>(num_vectors));
  }
  return default_num_clusters(num_vectors);
}

void HyperParams::validate() const {
  require(k >= 0, ErrorCode::Config, "k must be >= 0");
  require(max_hops >= 0, ErrorCode::Config, "max_hops must be >= 0");
  require(chunk_budget >= 1, ErrorCode::Config, "chunk_budget must be >= 1");
  require(max_insights >= 1, ErrorCode::Config, "max_insights must be >= 1");
  if (num_cluster_rule == NumClusterRule::Explicit) {
    require(explicit_num_clusters >= 1, ErrorCode::Config,
            "explicit cluster count must be >= 1");
  }
}

nlohmann::json to_json(const HyperParams& params) {
  nlohmann::json j;
  j["k"] = params.k;
  j["max_hops"] = params.max_hops;
  j["num_cluster_rule"] = to_string(params.num_cluster_rule);
  j["explicit_num_clusters"] = params.explicit_num_clusters;
  j["seed"] = params.seed;
  j["chunk_budget"] = params.chunk_budget;
  j["max_insights"] = params.max_insights;
  return j;
}

HyperParams hyperparams_from_json(const nlohmann::json& j) {
  HyperParams params;
  params.k = j.at("k").get<int>();
  params.max_hops = j.at("max_hops").get<int>();
  params.num_cluster_rule = num_cluster_rule_from_string(j.at("num_cluster_rule").get<std::string>());
  params.explicit_num_clusters = j.at("explicit_num_clusters").get<int>();
  params.seed = j.at("seed").get<std::uint64_t>();
  params.chunk_budget = j.at("chunk_budget").get<int>();
  params.max_insights = j.at("max_insights").get<int>();
  params.validate();
  return params;
}

}  // namespace insightgen
