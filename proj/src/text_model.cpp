#include "insightgen/text_model.hpp"

#include <chrono>
#include <sstream>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "insightgen/errors.hpp"
#include "insightgen/insight.hpp"
#include "insightgen/prompts.hpp"
#include "insightgen/rng.hpp"

namespace insightgen {

namespace {

// (label, block) pairs in presentation order; the block is the candidate
// text without its label line, so scores derived from it cannot depend on
// position.
std::vector<std::pair<std::string, std::string>> parse_candidates(
    const std::string& prompt) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(prompt);
  std::string line;
  std::string label;
  std::string block;
  auto flush = [&]() {
    if (label.empty()) return;
    while (!block.empty() && (block.back() == '\n' || block.back() == ' ')) block.pop_back();
    out.emplace_back(label, block);
    label.clear();
    block.clear();
  };
  while (std::getline(in, line)) {
    if (line.rfind("CANDIDATE ", 0) == 0) {
      flush();
      label = line.substr(10);
      while (!label.empty() && (label.back() == ' ' || label.back() == '\r')) label.pop_back();
      continue;
    }
    if (line.rfind("Reply with only", 0) == 0) {
      flush();
      continue;
    }
    if (!label.empty()) {
      block += line;
      block += '\n';
    }
  }
  flush();
  return out;
}

std::string dump_judge_reply(
    const std::vector<std::pair<std::string, double>>& scores) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [label, score] : scores) {
    j[label] = {{"score", score}, {"rationale", "deterministic scoring stub"}};
  }
  return j.dump();
}

const std::vector<std::string>& personas() {
  static const std::vector<std::string> v = {
      "graduate student", "industry analyst", "staff engineer",
      "curious generalist", "domain researcher", "product manager"};
  return v;
}

const std::vector<std::string>& goal_pool() {
  static const std::vector<std::string> v = {
      "build a working mental model of the topic",
      "compare alternatives before committing to one",
      "find gaps the answer glosses over",
      "connect the answer to adjacent material",
      "collect concrete follow-up questions",
      "judge how far the answer generalizes"};
  return v;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

MockTextModel::MockTextModel(std::uint64_t seed, std::string model_id)
    : seed_(seed), model_id_(std::move(model_id)) {}

std::string MockTextModel::complete(const std::string& prompt) {
  const std::string task = prompts::find_tagged_line(prompt, "TASK");
  std::uint64_t state = fnv1a64(prompt, fnv1a64(model_id_) ^ seed_);

  if (task == prompts::kTaskIntent) {
    IntentProfile profile;
    profile.persona = personas()[splitmix64(state) % personas().size()];
    const auto& pool = goal_pool();
    const std::size_t g0 = splitmix64(state) % pool.size();
    const std::size_t g1 = (g0 + 1 + splitmix64(state) % (pool.size() - 1)) % pool.size();
    profile.goals = {pool[g0], pool[g1]};
    profile.intents = {"go deeper than the given answer"};
    return to_json(profile).dump();
  }

  if (task == prompts::kTaskGeneration) {
    int max_n = 5;
    const std::string tag = prompts::find_tagged_line(prompt, "MAX_INSIGHTS");
    if (!tag.empty()) max_n = std::max(1, std::atoi(tag.c_str()));
    const int count = std::max(1, max_n - static_cast<int>(splitmix64(state) % 2));
    const int type_base = static_cast<int>(splitmix64(state) % kAllInsightTypes.size());
    const int type_step = 1 + 3 * static_cast<int>(splitmix64(state) % 2);  // coprime with 9

    nlohmann::json arr = nlohmann::json::array();
    for (int i = 0; i < count; ++i) {
      const std::uint64_t salt = splitmix64(state);
      const InsightType type =
          kAllInsightTypes[static_cast<std::size_t>((type_base + i * type_step) % 9)];
      nlohmann::json item;
      item["type"] = std::string(to_string(type));
      item["hook"] = "Angle " + std::to_string(i + 1) + " (" + hex64(salt).substr(0, 8) + ")";
      item["body"] =
          "The surrounding material points at a thread the answer leaves "
          "implicit; marker " +
          hex64(salt) +
          " tracks it. Weighing that thread against the answer suggests a "
          "follow-up the reader can check directly in the cited chunks.";
      item["takeaway"] = "Check the related theme tagged " + hex64(salt).substr(8) + ".";
      item["justification"] =
          "Drawn from context adjacent to the answer rather than the answer itself.";
      item["self_scores"] = {
          {"relevance", static_cast<double>(splitmix64(state) % 51) / 10.0},
          {"novelty", static_cast<double>(splitmix64(state) % 51) / 10.0},
          {"usefulness", static_cast<double>(splitmix64(state) % 51) / 10.0},
          {"intent_alignment", static_cast<double>(splitmix64(state) % 51) / 10.0},
      };
      arr.push_back(std::move(item));
    }
    return arr.dump();
  }

  if (task == prompts::kTaskSetJudgement || task == prompts::kTaskInsightJudgement) {
    std::vector<std::pair<std::string, double>> scores;
    for (const auto& [label, block] : parse_candidates(prompt)) {
      const std::uint64_t h = fnv1a64(block, fnv1a64(task) ^ seed_);
      scores.emplace_back(label, static_cast<double>(h % 501) / 100.0);
    }
    return dump_judge_reply(scores);
  }

  return "{}";
}

std::string ScriptedTextModel::complete(const std::string&) {
  ++calls_;
  require(!replies_.empty(), ErrorCode::Provider, "scripted model exhausted");
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

std::string ConstantScoreJudge::complete(const std::string& prompt) {
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& [label, block] : parse_candidates(prompt)) {
    (void)block;
    scores.emplace_back(label, score_);
  }
  return dump_judge_reply(scores);
}

namespace {

class HttpTextModel final : public TextModel {
 public:
  HttpTextModel(std::string endpoint, std::string api_key, std::string model_id,
                double temperature, int max_tokens, int max_retries)
      : endpoint_(std::move(endpoint)),
        api_key_(std::move(api_key)),
        model_id_(std::move(model_id)),
        temperature_(temperature),
        max_tokens_(max_tokens),
        max_retries_(max_retries) {}

  std::string model_id() const override { return model_id_; }

  std::string complete(const std::string& prompt) override {
    nlohmann::json body;
    body["model"] = model_id_;
    body["messages"] = nlohmann::json::array({
        nlohmann::json{{"role", "user"}, {"content", prompt}},
    });
    body["temperature"] = temperature_;
    body["max_tokens"] = max_tokens_;
    const std::string reply = post_with_retry(body.dump());
    nlohmann::json j = nlohmann::json::parse(reply, nullptr, false);
    require(!j.is_discarded(), ErrorCode::Protocol, "completion reply is not JSON");
    try {
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      raise(ErrorCode::Protocol, std::string("completion reply shape: ") + e.what());
    }
  }

 private:
  std::string post_with_retry(const std::string& payload) {
    const auto scheme_end = endpoint_.find("://");
    require(scheme_end != std::string::npos, ErrorCode::Config,
            "endpoint must include a scheme: " + endpoint_);
    const auto path_start = endpoint_.find('/', scheme_end + 3);
    const std::string base =
        path_start == std::string::npos ? endpoint_ : endpoint_.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
      }
      httplib::Client client(base);
      client.set_read_timeout(300, 0);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
      auto res = client.Post(path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "status " + std::to_string(res->status);
        continue;
      }
      require(res->status >= 200 && res->status < 300, ErrorCode::Provider,
              "completion endpoint returned status " + std::to_string(res->status));
      return res->body;
    }
    raise(ErrorCode::Provider, "completion request failed after retries: " + last_error);
  }

  std::string endpoint_;
  std::string api_key_;
  std::string model_id_;
  double temperature_;
  int max_tokens_;
  int max_retries_;
};

}  // namespace

std::unique_ptr<TextModel> make_http_text_model(const std::string& endpoint,
                                                const std::string& api_key,
                                                const std::string& model_id,
                                                double temperature, int max_tokens,
                                                int max_retries) {
  require(!endpoint.empty(), ErrorCode::Config, "completion endpoint not configured");
  require(!model_id.empty(), ErrorCode::Config, "completion model not configured");
  return std::make_unique<HttpTextModel>(endpoint, api_key, model_id, temperature,
                                         max_tokens, max_retries);
}

}  // namespace insightgen
