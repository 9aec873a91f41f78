#include "insightgen/judge.hpp"

#include <algorithm>

#include "insightgen/prompts.hpp"

namespace insightgen {

std::string candidate_label(std::size_t position) {
  std::string label;
  std::size_t p = position;
  do {
    label.insert(label.begin(), static_cast<char>('A' + p % 26));
    p = p / 26;
  } while (p-- > 0);
  return label;
}

namespace {

struct ParsedVerdict {
  double score;
  std::string rationale;
};

// One judge call with bounded repair-retries; returns label -> verdict.
std::map<std::string, ParsedVerdict> ask_judge(
    TextModel& judge, const std::string& prompt,
    const std::vector<std::string>& labels, int max_retries) {
  std::string next_prompt = prompt;
  std::string last_error;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const std::string reply = judge.complete(next_prompt);
    nlohmann::json j = nlohmann::json::parse(strip_code_fence(reply), nullptr, false);
    std::map<std::string, ParsedVerdict> verdicts;
    bool ok = !j.is_discarded() && j.is_object();
    if (!ok) last_error = "reply is not a JSON object";
    if (ok) {
      for (const std::string& label : labels) {
        if (!j.contains(label) || !j[label].is_object() ||
            !j[label].contains("score") || !j[label]["score"].is_number()) {
          ok = false;
          last_error = "missing or malformed verdict for label " + label;
          break;
        }
        const double score = j[label]["score"].get<double>();
        if (score < 0.0 || score > 5.0) {
          ok = false;
          last_error = "score out of range [0,5] for label " + label;
          break;
        }
        verdicts[label] = {score, j[label].value("rationale", std::string())};
      }
    }
    if (ok) return verdicts;
    next_prompt = prompts::make_repair_prompt(prompt, last_error);
  }
  raise(ErrorCode::JudgeParse, "judge reply still malformed after retries: " + last_error);
}

std::vector<std::string> sorted_methods(const std::map<std::string, InsightSet>& sets) {
  std::vector<std::string> methods;
  methods.reserve(sets.size());
  for (const auto& [method_id, set] : sets) {
    require(!set.insights.empty(), ErrorCode::Contract,
            "judging requires nonempty insight sets: " + method_id);
    methods.push_back(method_id);
  }
  return methods;  // std::map iterates in sorted order
}

}  // namespace

std::vector<JudgeScore> judge_set_level(const QARecord& qa,
                                        const std::map<std::string, InsightSet>& sets,
                                        TextModel& judge, Rng& rng,
                                        const std::vector<std::string>& criteria,
                                        int max_retries) {
  require(sets.size() >= 2, ErrorCode::Contract,
          "set-level judging needs at least two methods");
  const std::vector<std::string> methods = sorted_methods(sets);

  const std::vector<std::size_t> perm = draw_permutation(methods.size(), rng);
  std::vector<std::pair<std::string, std::string>> candidates;
  std::vector<std::string> labels;
  std::map<std::string, std::string> method_of_label;
  for (std::size_t pos = 0; pos < perm.size(); ++pos) {
    const std::string& method = methods[perm[pos]];
    const std::string label = candidate_label(pos);
    candidates.emplace_back(label, prompts::render_set_for_judging(sets.at(method)));
    labels.push_back(label);
    method_of_label[label] = method;
  }

  const std::string prompt =
      prompts::render_set_judge_prompt(qa.question, qa.answer, candidates, criteria);
  const auto verdicts = ask_judge(judge, prompt, labels, max_retries);

  std::vector<JudgeScore> scores;
  scores.reserve(methods.size());
  for (const std::string& method : methods) {
    for (const auto& [label, verdict] : verdicts) {
      if (method_of_label.at(label) == method) {
        scores.push_back(JudgeScore{qa.qa_id, method, verdict.score, verdict.rationale});
        break;
      }
    }
  }
  return scores;
}

InsightLevelResult judge_insight_level(const QARecord& qa,
                                       const std::map<std::string, InsightSet>& sets,
                                       TextModel& judge, Rng& rng, int repeats,
                                       const std::vector<std::string>& criteria,
                                       int max_retries) {
  require(sets.size() >= 2, ErrorCode::Contract,
          "insight-level judging needs at least two methods");
  require(repeats >= 1, ErrorCode::Contract, "repeats must be >= 1");
  const std::vector<std::string> methods = sorted_methods(sets);

  InsightLevelResult result;
  std::map<std::string, double> sums;
  for (int r = 0; r < repeats; ++r) {
    const std::vector<std::size_t> perm = draw_permutation(methods.size(), rng);
    // the sampling order is fixed (sorted methods) so the draw sequence is
    // independent of the permutation
    std::map<std::string, int> sampled;
    for (const std::string& method : methods) {
      const auto& insights = sets.at(method).insights;
      sampled[method] = static_cast<int>(
          uniform_below(rng, static_cast<std::uint64_t>(insights.size())));
    }

    std::vector<std::pair<std::string, std::string>> candidates;
    std::vector<std::string> labels;
    std::map<std::string, std::string> method_of_label;
    for (std::size_t pos = 0; pos < perm.size(); ++pos) {
      const std::string& method = methods[perm[pos]];
      const std::string label = candidate_label(pos);
      const Insight& insight =
          sets.at(method).insights[static_cast<std::size_t>(sampled.at(method))];
      candidates.emplace_back(label, prompts::render_insight_for_judging(insight));
      labels.push_back(label);
      method_of_label[label] = method;
    }

    const std::string prompt = prompts::render_insight_judge_prompt(
        qa.question, qa.answer, candidates, criteria);
    const auto verdicts = ask_judge(judge, prompt, labels, max_retries);

    std::map<std::string, std::pair<int, double>> row;
    for (const auto& [label, verdict] : verdicts) {
      const std::string& method = method_of_label.at(label);
      row[method] = {sampled.at(method), verdict.score};
      sums[method] += verdict.score;
    }
    result.repeats.push_back(std::move(row));
  }
  for (const std::string& method : methods) {
    result.mean_scores[method] = sums[method] / static_cast<double>(repeats);
  }
  return result;
}

}  // namespace insightgen
