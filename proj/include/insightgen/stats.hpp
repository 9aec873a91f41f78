#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace insightgen {

// Average ranks (1-based); tied values share the mean of their rank range.
std::vector<double> average_ranks(const std::vector<double>& values);

// Pearson correlation over average-ranked vectors.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

struct WilcoxonResult {
  double w = 0.0;         // min(T+, T-)
  double p = 0.0;         // two-sided
  double z = 0.0;         // signed normal statistic (continuity corrected)
  double effect_r = 0.0;  // |z| / sqrt(n)
  int n = 0;              // pairs remaining after dropping zero differences
  bool exact = false;
};

// Paired signed-rank test. Zero differences are dropped; tied |differences|
// get average ranks. n <= 25 uses the exact conditional distribution of T+,
// larger n the normal approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

double bonferroni_alpha(double base_alpha, int num_tests);

struct WilcoxonComparison {
  std::string comparison_id;  // "<judge>:<method> vs <reference>"
  double w = 0.0;
  double p = 0.0;
  double effect_r = 0.0;
  int n = 0;
  bool significant = false;  // under the Bonferroni-corrected alpha
};

struct AgreementReport {
  std::map<std::string, double> spearman_per_domain;
  double pairwise_ordering_agreement = 0.0;
  double mean_top2_jaccard = 0.0;
  std::vector<WilcoxonComparison> wilcoxon;
  double base_alpha = 0.05;
  double corrected_alpha = 0.0;
  int num_comparisons = 0;
  int num_questions = 0;
};

// (qa_id, method_id) -> mean score for one judge.
using ScoreTable = std::map<std::pair<std::string, std::string>, double>;

// Inter-judge agreement over two aligned score tables: Spearman per domain
// (one "all" domain when no mapping is given), the fraction of method pairs
// ordered identically by both judges per question (ties agree only with
// ties), the mean Jaccard overlap of the judges' top-2 method sets, and one
// signed-rank test per judge comparing each non-reference method to the
// reference across questions, under a Bonferroni-corrected alpha.
// family_count <= 0 means the correction family is the comparison count.
AgreementReport agreement_stats(const ScoreTable& judge_a, const ScoreTable& judge_b,
                                const std::map<std::string, std::string>& qa_domain = {},
                                const std::string& reference_method = "INSIGHTGEN",
                                double base_alpha = 0.05, int family_count = 0);

}  // namespace insightgen
