#include "insightgen/prompts.hpp"

#include <sstream>

#include "insightgen/errors.hpp"

namespace insightgen::prompts {

namespace {

constexpr std::string_view kIntentTemplate =
    R"(TASK: intent_profile
TEMPLATE_VERSION: {{version}}
Infer who is asking and why from the question and answer below.

QUESTION:
{{question}}

ANSWER:
{{answer}}

Reply with only a JSON object of the form
{"persona": string, "goals": [string, ...], "intents": [string, ...]}.
)";

constexpr std::string_view kTwoStepTemplate =
    R"(TASK: insight_generation
TEMPLATE_VERSION: {{version}}
You assist a reader who just received an answer to their question. Surface
insights that go beyond the answer: connections, gaps, framings and
applications grounded in the reference material between the context markers.

READER_INTENT:
{{intent}}

QUESTION:
{{question}}

ANSWER:
{{answer}}

CONTEXT_BEGIN
{{context}}
CONTEXT_END

INSIGHT_TYPES: {{types}}
MAX_INSIGHTS: {{max_insights}}
Think step by step: first identify which themes in the context complement the
answer, then compose at most {{max_insights}} insights that differ from each
other and from the answer. Reply with only a JSON array whose elements are
{"type": one of INSIGHT_TYPES, "hook": string, "body": string,
"takeaway": string, "justification": string,
"self_scores": {"relevance": 0-5, "novelty": 0-5, "usefulness": 0-5,
"intent_alignment": 0-5}}.
)";

constexpr std::string_view kSingleStepTemplate =
    R"(TASK: insight_generation
TEMPLATE_VERSION: {{version}}
You assist a reader who just received an answer to their question. Surface
insights that satisfy requirements such as relevance, novelty, and diversity,
grounded in the reference material between the context markers.

QUESTION:
{{question}}

ANSWER:
{{answer}}

CONTEXT_BEGIN
{{context}}
CONTEXT_END

INSIGHT_TYPES: {{types}}
MAX_INSIGHTS: {{max_insights}}
Compose at most {{max_insights}} insights that differ from each other and
from the answer. Reply with only a JSON array whose elements are
{"type": one of INSIGHT_TYPES, "hook": string, "body": string,
"takeaway": string, "justification": string,
"self_scores": {"relevance": 0-5, "novelty": 0-5, "usefulness": 0-5,
"intent_alignment": 0-5}}.
)";

constexpr std::string_view kJudgeTemplate =
    R"(TASK: {{task}}
TEMPLATE_VERSION: {{version}}
You are an impartial judge. Score each candidate below on these criteria:
{{criteria}}. Weigh the criteria together into one overall score from 0 to 5
per candidate. Do not reward position or length.

QUESTION:
{{question}}

ANSWER:
{{answer}}

{{candidates}}

Reply with only a JSON object mapping each candidate label to
{"score": number in [0,5], "rationale": string}.
)";

std::string insight_types_csv() {
  std::ostringstream out;
  for (std::size_t i = 0; i < kAllInsightTypes.size(); ++i) {
    if (i > 0) out << ", ";
    out << to_string(kAllInsightTypes[i]);
  }
  return out.str();
}

std::string criteria_csv(const std::vector<std::string>& criteria) {
  std::ostringstream out;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (i > 0) out << ", ";
    out << criteria[i];
  }
  return out.str();
}

std::string render_judge_prompt(
    std::string_view task, const std::string& question, const std::string& answer,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const std::vector<std::string>& criteria) {
  require(!candidates.empty(), ErrorCode::Contract, "judge prompt: no candidates");
  require(!criteria.empty(), ErrorCode::Contract, "judge prompt: no criteria");
  std::ostringstream block;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0) block << '\n';
    block << "CANDIDATE " << candidates[i].first << '\n' << candidates[i].second << '\n';
  }
  return render(kJudgeTemplate, {
                                    {"task", std::string(task)},
                                    {"version", std::string(kTemplateVersion)},
                                    {"criteria", criteria_csv(criteria)},
                                    {"question", question},
                                    {"answer", answer},
                                    {"candidates", block.str()},
                                });
}

}  // namespace

std::string render(std::string_view tmpl,
                   const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const auto close = tmpl.find("}}", open + 2);
    require(close != std::string_view::npos, ErrorCode::Contract,
            "template: unterminated placeholder");
    const std::string name(tmpl.substr(open + 2, close - open - 2));
    const auto it = vars.find(name);
    require(it != vars.end(), ErrorCode::Contract,
            "template: no value for placeholder '" + name + "'");
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

std::string render_intent_prompt(const std::string& question,
                                 const std::string& answer) {
  return render(kIntentTemplate, {
                                     {"version", std::string(kTemplateVersion)},
                                     {"question", question},
                                     {"answer", answer},
                                 });
}

std::string render_generation_prompt(bool two_step, const std::string& question,
                                     const std::string& answer,
                                     const std::string& context,
                                     const std::string& intent_json,
                                     int max_insights) {
  std::map<std::string, std::string> vars = {
      {"version", std::string(kTemplateVersion)},
      {"question", question},
      {"answer", answer},
      {"context", context},
      {"types", insight_types_csv()},
      {"max_insights", std::to_string(max_insights)},
  };
  if (two_step) {
    vars["intent"] = intent_json;
    return render(kTwoStepTemplate, vars);
  }
  return render(kSingleStepTemplate, vars);
}

std::string render_insight_for_judging(const Insight& insight) {
  std::ostringstream out;
  out << "[" << to_string(insight.type) << "] " << insight.hook << "\n"
      << insight.body;
  if (!insight.takeaway.empty()) out << "\nTakeaway: " << insight.takeaway;
  return out.str();
}

std::string render_set_for_judging(const InsightSet& set) {
  std::ostringstream out;
  for (std::size_t i = 0; i < set.insights.size(); ++i) {
    if (i > 0) out << '\n';
    out << (i + 1) << ". " << render_insight_for_judging(set.insights[i]);
  }
  return out.str();
}

std::string render_set_judge_prompt(
    const std::string& question, const std::string& answer,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const std::vector<std::string>& criteria) {
  return render_judge_prompt(kTaskSetJudgement, question, answer, candidates, criteria);
}

std::string render_insight_judge_prompt(
    const std::string& question, const std::string& answer,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const std::vector<std::string>& criteria) {
  return render_judge_prompt(kTaskInsightJudgement, question, answer, candidates,
                             criteria);
}

std::string make_repair_prompt(const std::string& original,
                               const std::string& error) {
  std::ostringstream out;
  out << "REPAIR: the previous reply could not be used (" << error
      << "). Answer the prompt below again, with only valid JSON in the "
         "requested shape.\n\n"
      << original;
  return out.str();
}

std::string find_tagged_line(std::string_view text, std::string_view key) {
  const std::string tag = std::string(key) + ": ";
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    if (line.substr(0, tag.size()) == tag) {
      return std::string(line.substr(tag.size()));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return {};
}

}  // namespace insightgen::prompts
