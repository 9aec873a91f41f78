#include "insightgen/engine.hpp"

#include <algorithm>
#include <vector>

#include "insightgen/errors.hpp"
#include "insightgen/prompts.hpp"

namespace insightgen {

bool shares_long_substring(std::string_view a, std::string_view b,
                           std::size_t min_len) {
  if (min_len == 0) return true;
  if (a.size() < min_len || b.size() < min_len) return false;
  // rolling longest-common-suffix table over (a, b)
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        cur[j] = prev[j - 1] + 1;
        if (cur[j] >= min_len) return true;
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return false;
}

IntentProfile infer_intent(const std::string& question, const std::string& answer,
                           TextModel& model, int max_retries) {
  require(!question.empty() && !answer.empty(), ErrorCode::Contract,
          "infer_intent: question and answer must be nonempty");
  const std::string prompt = prompts::render_intent_prompt(question, answer);
  std::string next_prompt = prompt;
  std::string last_error;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const std::string reply = model.complete(next_prompt);
    nlohmann::json j = nlohmann::json::parse(strip_code_fence(reply), nullptr, false);
    if (!j.is_discarded()) {
      try {
        return intent_profile_from_json(j);
      } catch (const Error& e) {
        last_error = e.what();
      }
    } else {
      last_error = "reply is not valid JSON";
    }
    next_prompt = prompts::make_repair_prompt(prompt, last_error);
  }
  raise(ErrorCode::GenerationParse,
        "intent profile still malformed after retries: " + last_error);
}

InsightSet generate_insights(const std::string& qa_id, const std::string& method_id,
                             const std::string& question, const std::string& answer,
                             const std::string& context,
                             const IntentProfile* intent, TextModel& model,
                             int max_insights, int max_retries) {
  require(!question.empty() && !answer.empty(), ErrorCode::Contract,
          "generate_insights: question and answer must be nonempty");
  require(max_insights >= 1, ErrorCode::Contract,
          "generate_insights: max_insights must be >= 1");

  const std::string intent_json = intent ? to_json(*intent).dump() : std::string();
  const std::string prompt = prompts::render_generation_prompt(
      intent != nullptr, question, answer, context, intent_json, max_insights);

  std::vector<Insight> insights;
  std::string next_prompt = prompt;
  std::string last_error;
  bool parsed = false;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const std::string reply = model.complete(next_prompt);
    try {
      insights = parse_insights(reply);
      parsed = true;
      break;
    } catch (const Error& e) {
      last_error = e.what();
      next_prompt = prompts::make_repair_prompt(prompt, last_error);
    }
  }
  require(parsed, ErrorCode::GenerationParse,
          "insight reply still malformed after retries: " + last_error);

  if (insights.size() > static_cast<std::size_t>(max_insights)) {
    insights.resize(static_cast<std::size_t>(max_insights));
  }
  std::erase_if(insights, [&](const Insight& insight) {
    return shares_long_substring(insight.body, answer, kRepetitionGuardChars);
  });
  require(!insights.empty(), ErrorCode::EmptyGeneration,
          "no insights survived generation for " + qa_id + "/" + method_id);

  InsightSet set;
  set.qa_id = qa_id;
  set.method_id = method_id;
  set.template_version = std::string(prompts::kTemplateVersion);
  set.insights = std::move(insights);
  return set;
}

}  // namespace insightgen
