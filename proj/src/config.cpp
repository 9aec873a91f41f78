#include "insightgen/config.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "insightgen/errors.hpp"
#include "insightgen/store.hpp"

namespace insightgen {

std::vector<std::string> Config::insight_criteria() const {
  std::vector<std::string> out;
  for (const std::string& c : set_criteria) {
    if (c != "Diversity") out.push_back(c);
  }
  return out;
}

void Config::validate() const {
  params.validate();
  require(context_budget >= 1, ErrorCode::Config, "context_budget must be >= 1");
  require(mock_embedding_dim >= 1, ErrorCode::Config, "mock_embedding_dim must be >= 1");
  require(parallelism >= 1, ErrorCode::Config, "parallelism must be >= 1");
  require(max_retries >= 0, ErrorCode::Config, "max_retries must be >= 0");
  require(judge_repeats >= 1, ErrorCode::Config, "judge_repeats must be >= 1");
  require(!set_criteria.empty(), ErrorCode::Config, "set_criteria must be nonempty");
}

namespace {

void merge_file(Config& config, const std::filesystem::path& file) {
  const nlohmann::json j = read_json_file(file);
  require(j.is_object(), ErrorCode::Config, "config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "k") config.params.k = value.get<int>();
      else if (key == "max_hops") config.params.max_hops = value.get<int>();
      else if (key == "num_cluster_rule")
        config.params.num_cluster_rule = num_cluster_rule_from_string(value.get<std::string>());
      else if (key == "explicit_num_clusters")
        config.params.explicit_num_clusters = value.get<int>();
      else if (key == "seed") config.params.seed = value.get<std::uint64_t>();
      else if (key == "chunk_budget") config.params.chunk_budget = value.get<int>();
      else if (key == "max_insights") config.params.max_insights = value.get<int>();
      else if (key == "context_budget") config.context_budget = value.get<int>();
      else if (key == "expansion_mode")
        config.expansion_mode = expansion_mode_from_string(value.get<std::string>());
      else if (key == "cluster_method")
        config.cluster_method = cluster_method_from_string(value.get<std::string>());
      else if (key == "mock") config.mock = value.get<bool>();
      else if (key == "mock_embedding_dim") config.mock_embedding_dim = value.get<int>();
      else if (key == "parallelism") config.parallelism = value.get<int>();
      else if (key == "max_retries") config.max_retries = value.get<int>();
      else if (key == "judge_repeats") config.judge_repeats = value.get<int>();
      else if (key == "sim_query_includes_answer")
        config.sim_query_includes_answer = value.get<bool>();
      else if (key == "set_criteria")
        config.set_criteria = value.get<std::vector<std::string>>();
      else if (key == "embed_endpoint") config.embed.endpoint = value.get<std::string>();
      else if (key == "embed_api_key") config.embed.api_key = value.get<std::string>();
      else if (key == "embed_model") config.embed.model = value.get<std::string>();
      else if (key == "llm_endpoint") config.llm.endpoint = value.get<std::string>();
      else if (key == "llm_api_key") config.llm.api_key = value.get<std::string>();
      else if (key == "llm_model") config.llm.model = value.get<std::string>();
      else if (key == "judge_model") config.judge_model = value.get<std::string>();
      else raise(ErrorCode::Config, "unknown config key: " + key);
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::Config, "config key '" + key + "': " + e.what());
    }
  }
}

std::string env_or_empty(const char* name) {
  const char* value = std::getenv(name);
  return value ? std::string(value) : std::string();
}

}  // namespace

void apply_environment(Config& config) {
  if (auto v = env_or_empty("EMBED_ENDPOINT"); !v.empty()) config.embed.endpoint = v;
  if (auto v = env_or_empty("EMBED_API_KEY"); !v.empty()) config.embed.api_key = v;
  if (auto v = env_or_empty("EMBED_MODEL"); !v.empty()) config.embed.model = v;
  if (auto v = env_or_empty("LLM_ENDPOINT"); !v.empty()) config.llm.endpoint = v;
  if (auto v = env_or_empty("LLM_API_KEY"); !v.empty()) config.llm.api_key = v;
  if (auto v = env_or_empty("LLM_MODEL"); !v.empty()) config.llm.model = v;
}

Config load_config(const std::optional<std::filesystem::path>& file) {
  Config config;
  if (file) {
    require(std::filesystem::exists(*file), ErrorCode::Config,
            "config file not found: " + file->string());
    merge_file(config, *file);
  }
  apply_environment(config);
  return config;
}

std::unique_ptr<EmbeddingProvider> make_embedding_provider(const Config& config) {
  if (config.mock) {
    return std::make_unique<MockEmbeddingProvider>(config.mock_embedding_dim);
  }
  return make_http_embedding_provider(config.embed.endpoint, config.embed.api_key,
                                      config.embed.model);
}

std::unique_ptr<TextModel> make_text_model(const Config& config) {
  if (config.mock) {
    return std::make_unique<MockTextModel>(config.params.seed);
  }
  return make_http_text_model(config.llm.endpoint, config.llm.api_key,
                              config.llm.model);
}

std::unique_ptr<TextModel> make_judge_model(const Config& config) {
  const std::string model =
      config.judge_model.empty() ? config.llm.model : config.judge_model;
  if (config.mock) {
    return std::make_unique<MockTextModel>(config.params.seed,
                                           model.empty() ? "mock-judge" : model);
  }
  return make_http_text_model(config.llm.endpoint, config.llm.api_key, model);
}

}  // namespace insightgen
