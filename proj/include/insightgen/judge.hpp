#pragma once

#include <map>
#include <string>
#include <vector>

#include "insightgen/insight.hpp"
#include "insightgen/rng.hpp"
#include "insightgen/store.hpp"
#include "insightgen/text_model.hpp"

namespace insightgen {

struct JudgeScore {
  std::string qa_id;
  std::string method_id;
  double score = 0.0;
  std::string rationale;
};

// Set-level protocol: methods are sorted, shuffled with the seeded
// generator, labeled A.. in presentation order and judged in one prompt;
// scores are reattached to methods by label. Results come back in sorted
// method order.
std::vector<JudgeScore> judge_set_level(const QARecord& qa,
                                        const std::map<std::string, InsightSet>& sets,
                                        TextModel& judge, Rng& rng,
                                        const std::vector<std::string>& criteria,
                                        int max_retries = 2);

struct InsightLevelResult {
  std::map<std::string, double> mean_scores;
  // per repeat: method -> (sampled insight index, score)
  std::vector<std::map<std::string, std::pair<int, double>>> repeats;
};

// Insight-level protocol: per repeat, one fresh permutation is drawn, then
// one uniformly sampled insight per method (methods visited in sorted order)
// is judged. Means are over repeats.
InsightLevelResult judge_insight_level(const QARecord& qa,
                                       const std::map<std::string, InsightSet>& sets,
                                       TextModel& judge, Rng& rng, int repeats,
                                       const std::vector<std::string>& criteria,
                                       int max_retries = 2);

// Position labels "A", "B", ... "Z", "AA", ...
std::string candidate_label(std::size_t position);

}  // namespace insightgen
