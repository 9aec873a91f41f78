#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "insightgen/embedding.hpp"
#include "insightgen/hyperparams.hpp"
#include "insightgen/text_model.hpp"

namespace insightgen {

struct ProviderEndpoint {
  std::string endpoint;
  std::string api_key;
  std::string model;
};

// Effective settings; precedence is CLI flags > environment > config file >
// defaults. The file and environment are merged by load_config; flags are
// applied by the CLI layer afterwards.
struct Config {
  HyperParams params;
  int context_budget = 24000;
  ExpansionMode expansion_mode = ExpansionMode::Bfs;
  ClusterMethod cluster_method = ClusterMethod::KMeans;
  bool mock = false;
  int mock_embedding_dim = 64;
  int parallelism = 4;
  int max_retries = 2;
  int judge_repeats = 10;
  bool sim_query_includes_answer = false;
  std::vector<std::string> set_criteria = {"Novelty", "Diversity", "Relevance", "Depth"};
  ProviderEndpoint embed;
  ProviderEndpoint llm;
  std::string judge_model;  // overrides llm.model for judging when set

  std::vector<std::string> insight_criteria() const;  // set criteria minus Diversity
  void validate() const;
};

Config load_config(const std::optional<std::filesystem::path>& file);
void apply_environment(Config& config);

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const Config& config);
std::unique_ptr<TextModel> make_text_model(const Config& config);
std::unique_ptr<TextModel> make_judge_model(const Config& config);

}  // namespace insightgen
