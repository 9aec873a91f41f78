#include "insightgen/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "insightgen/errors.hpp"

namespace insightgen {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), ErrorCode::Contract, "spearman: length mismatch");
  require(x.size() >= 2, ErrorCode::Contract, "spearman: need at least two pairs");
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const std::size_t n = rx.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    cov += dx * dy;
    vx += dx * dx;
    vy += dy * dy;
  }
  require(vx > 0.0 && vy > 0.0, ErrorCode::DegenerateSample,
          "spearman: constant input has no defined correlation");
  return cov / std::sqrt(vx * vy);
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  require(a.size() == b.size(), ErrorCode::Contract, "wilcoxon: length mismatch");
  require(!a.empty(), ErrorCode::Contract, "wilcoxon: empty input");

  std::vector<double> diff;
  diff.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diff.push_back(d);
  }
  require(!diff.empty(), ErrorCode::DegenerateSample,
          "wilcoxon: all differences are zero");
  const int n = static_cast<int>(diff.size());
  require(n >= 5, ErrorCode::Contract,
          "wilcoxon: need at least 5 nonzero differences");

  std::vector<double> abs_diff(diff.size());
  for (std::size_t i = 0; i < diff.size(); ++i) abs_diff[i] = std::abs(diff[i]);
  const std::vector<double> ranks = average_ranks(abs_diff);

  double t_plus = 0.0;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    if (diff[i] > 0.0) t_plus += ranks[i];
  }
  const double rank_sum = static_cast<double>(n) * (n + 1) / 2.0;
  const double t_minus = rank_sum - t_plus;

  // tie correction over groups of equal |difference|
  std::vector<double> sorted_abs = abs_diff;
  std::sort(sorted_abs.begin(), sorted_abs.end());
  double tie_sum = 0.0;
  for (std::size_t i = 0; i < sorted_abs.size();) {
    std::size_t j = i;
    while (j + 1 < sorted_abs.size() && sorted_abs[j + 1] == sorted_abs[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  const double mean = static_cast<double>(n) * (n + 1) / 4.0;
  const double var =
      static_cast<double>(n) * (n + 1) * (2.0 * n + 1) / 24.0 - tie_sum / 48.0;
  const double sd = std::sqrt(var);
  const double num = t_plus - mean;
  const double sign = num > 0.0 ? 1.0 : (num < 0.0 ? -1.0 : 0.0);
  const double z = sign * std::max(0.0, std::abs(num) - 0.5) / sd;

  WilcoxonResult result;
  result.n = n;
  result.w = std::min(t_plus, t_minus);
  result.z = z;
  result.effect_r = std::abs(z) / std::sqrt(static_cast<double>(n));

  if (n <= 25) {
    // exact conditional distribution of T+ via subset sums of doubled ranks
    std::vector<long long> doubled(ranks.size());
    long long total_doubled = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      doubled[i] = std::llround(2.0 * ranks[i]);
      total_doubled += doubled[i];
    }
    std::vector<double> dp(static_cast<std::size_t>(total_doubled) + 1, 0.0);
    dp[0] = 1.0;
    for (const long long dr : doubled) {
      for (long long s = total_doubled; s >= dr; --s) {
        dp[static_cast<std::size_t>(s)] += dp[static_cast<std::size_t>(s - dr)];
      }
    }
    const long long target = std::llround(2.0 * t_plus);
    double cdf = 0.0, sf = 0.0;
    for (long long s = 0; s <= total_doubled; ++s) {
      const double c = dp[static_cast<std::size_t>(s)];
      if (s <= target) cdf += c;
      if (s >= target) sf += c;
    }
    const double total = std::ldexp(1.0, n);  // 2^n
    result.p = std::min(1.0, 2.0 * std::min(cdf, sf) / total);
    result.exact = true;
  } else {
    result.p = std::erfc(std::abs(z) / std::sqrt(2.0));
    result.exact = false;
  }
  return result;
}

double bonferroni_alpha(double base_alpha, int num_tests) {
  require(base_alpha > 0.0 && base_alpha <= 1.0, ErrorCode::Contract,
          "bonferroni: base alpha must be in (0,1]");
  require(num_tests >= 1, ErrorCode::Contract, "bonferroni: need at least one test");
  return base_alpha / static_cast<double>(num_tests);
}

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

std::vector<std::string> top2_methods(const ScoreTable& table, const std::string& qa,
                                      const std::vector<std::string>& methods) {
  std::vector<std::string> order = methods;
  std::sort(order.begin(), order.end(), [&](const std::string& a, const std::string& b) {
    const double sa = table.at({qa, a});
    const double sb = table.at({qa, b});
    if (sa != sb) return sa > sb;
    return a < b;
  });
  if (order.size() > 2) order.resize(2);
  return order;
}

}  // namespace

AgreementReport agreement_stats(const ScoreTable& judge_a, const ScoreTable& judge_b,
                                const std::map<std::string, std::string>& qa_domain,
                                const std::string& reference_method,
                                double base_alpha, int family_count) {
  require(!judge_a.empty(), ErrorCode::Contract, "agreement: empty score table");
  require(judge_a.size() == judge_b.size(), ErrorCode::Contract,
          "agreement: judges scored different numbers of cells");
  for (const auto& [key, score] : judge_a) {
    (void)score;
    require(judge_b.count(key) == 1, ErrorCode::Contract,
            "agreement: judges scored different (question, method) cells");
  }

  std::set<std::string> qa_set;
  std::set<std::string> method_set;
  for (const auto& [key, score] : judge_a) {
    (void)score;
    qa_set.insert(key.first);
    method_set.insert(key.second);
  }
  const std::vector<std::string> qa_ids(qa_set.begin(), qa_set.end());
  const std::vector<std::string> methods(method_set.begin(), method_set.end());
  require(methods.size() >= 2, ErrorCode::Contract,
          "agreement: need at least two methods");
  for (const std::string& qa : qa_ids) {
    for (const std::string& m : methods) {
      require(judge_a.count({qa, m}) == 1, ErrorCode::Contract,
              "agreement: incomplete score grid for " + qa + "/" + m);
    }
  }
  require(method_set.count(reference_method) == 1, ErrorCode::Contract,
          "agreement: reference method has no scores: " + reference_method);

  AgreementReport report;
  report.num_questions = static_cast<int>(qa_ids.size());
  report.base_alpha = base_alpha;

  // Spearman per domain over the flattened (question, method) cells
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_domain;
  for (const std::string& qa : qa_ids) {
    const auto dom_it = qa_domain.find(qa);
    const std::string domain = dom_it == qa_domain.end() ? "all" : dom_it->second;
    for (const std::string& m : methods) {
      by_domain[domain].first.push_back(judge_a.at({qa, m}));
      by_domain[domain].second.push_back(judge_b.at({qa, m}));
    }
  }
  for (const auto& [domain, xy] : by_domain) {
    try {
      report.spearman_per_domain[domain] = spearman_rho(xy.first, xy.second);
    } catch (const Error&) {
      // constant scores in a domain leave its correlation undefined
    }
  }

  // fraction of per-question method pairs ordered the same way
  long long agree = 0, pairs = 0;
  for (const std::string& qa : qa_ids) {
    for (std::size_t i = 0; i < methods.size(); ++i) {
      for (std::size_t j = i + 1; j < methods.size(); ++j) {
        const int sa = sign_of(judge_a.at({qa, methods[i]}) - judge_a.at({qa, methods[j]}));
        const int sb = sign_of(judge_b.at({qa, methods[i]}) - judge_b.at({qa, methods[j]}));
        agree += (sa == sb) ? 1 : 0;
        ++pairs;
      }
    }
  }
  report.pairwise_ordering_agreement =
      pairs > 0 ? static_cast<double>(agree) / static_cast<double>(pairs) : 0.0;

  // mean Jaccard of top-2 method sets
  double jaccard_sum = 0.0;
  for (const std::string& qa : qa_ids) {
    const auto ta = top2_methods(judge_a, qa, methods);
    const auto tb = top2_methods(judge_b, qa, methods);
    const std::set<std::string> sa(ta.begin(), ta.end());
    const std::set<std::string> sb(tb.begin(), tb.end());
    std::size_t inter = 0;
    for (const auto& m : sa) inter += sb.count(m);
    const std::size_t uni = sa.size() + sb.size() - inter;
    jaccard_sum += uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
  report.mean_top2_jaccard = jaccard_sum / static_cast<double>(qa_ids.size());

  // per judge, each non-reference method vs the reference
  const int attempted = 2 * (static_cast<int>(methods.size()) - 1);
  report.num_comparisons = attempted;
  const int family = family_count > 0 ? family_count : attempted;
  report.corrected_alpha = bonferroni_alpha(base_alpha, family);

  const std::array<std::pair<std::string, const ScoreTable*>, 2> judges = {
      std::pair<std::string, const ScoreTable*>{"judge_a", &judge_a},
      std::pair<std::string, const ScoreTable*>{"judge_b", &judge_b},
  };
  for (const auto& [judge_name, table] : judges) {
    for (const std::string& m : methods) {
      if (m == reference_method) continue;
      std::vector<double> x, y;
      x.reserve(qa_ids.size());
      y.reserve(qa_ids.size());
      for (const std::string& qa : qa_ids) {
        x.push_back(table->at({qa, m}));
        y.push_back(table->at({qa, reference_method}));
      }
      WilcoxonComparison cmp;
      cmp.comparison_id = judge_name + ":" + m + " vs " + reference_method;
      try {
        const WilcoxonResult wr = wilcoxon_signed_rank(x, y);
        cmp.w = wr.w;
        cmp.p = wr.p;
        cmp.effect_r = wr.effect_r;
        cmp.n = wr.n;
        cmp.significant = wr.p < report.corrected_alpha;
        report.wilcoxon.push_back(std::move(cmp));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateSample) throw;
        // identical score vectors carry no paired signal; skip the test
      }
    }
  }
  return report;
}

}  // namespace insightgen
