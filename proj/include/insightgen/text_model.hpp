#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>

namespace insightgen {

class TextModel {
 public:
  virtual ~TextModel() = default;
  virtual std::string model_id() const = 0;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Deterministic offline model: the reply is a pure function of (seed,
// prompt). Dispatches on the TASK tag in the prompt and emits schema-valid
// JSON for intent, generation and judging prompts.
class MockTextModel final : public TextModel {
 public:
  explicit MockTextModel(std::uint64_t seed, std::string model_id = "mock-llm");

  std::string model_id() const override { return model_id_; }
  std::string complete(const std::string& prompt) override;

 private:
  std::uint64_t seed_;
  std::string model_id_;
};

// Replays canned replies in order; used to exercise retry and parse paths.
class ScriptedTextModel final : public TextModel {
 public:
  explicit ScriptedTextModel(std::deque<std::string> replies)
      : replies_(std::move(replies)) {}

  std::string model_id() const override { return "scripted"; }
  std::string complete(const std::string& prompt) override;
  int calls() const { return calls_; }

 private:
  std::deque<std::string> replies_;
  int calls_ = 0;
};

// Judge stub that gives every candidate the same score.
class ConstantScoreJudge final : public TextModel {
 public:
  explicit ConstantScoreJudge(double score) : score_(score) {}

  std::string model_id() const override { return "constant-judge"; }
  std::string complete(const std::string& prompt) override;

 private:
  double score_;
};

// Remote chat-completions model (temperature 0.7, max 4000 output tokens);
// transient transport failures retry with exponential backoff.
std::unique_ptr<TextModel> make_http_text_model(const std::string& endpoint,
                                                const std::string& api_key,
                                                const std::string& model_id,
                                                double temperature = 0.7,
                                                int max_tokens = 4000,
                                                int max_retries = 3);

}  // namespace insightgen
