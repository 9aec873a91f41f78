#include "insightgen/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "insightgen/judge.hpp"
#include "insightgen/methods.hpp"
#include "insightgen/stats.hpp"
#include "insightgen/store.hpp"

namespace insightgen::cli {

namespace fs = std::filesystem;

namespace {

// Accepts either the index root or its results/ subdirectory.
fs::path resolve_index_root(const fs::path& dir) {
  if (fs::exists(dir / "results")) return dir;
  if (dir.filename() == "results" && fs::exists(dir)) return dir.parent_path();
  raise(ErrorCode::Io, "no results found under " + dir.string());
}

// One deterministic generator per (question, purpose); independent of the
// order questions are processed in.
Rng make_question_rng(const std::string& purpose, const std::string& qa_id,
                      std::uint64_t seed) {
  std::uint64_t h = fnv1a64(purpose);
  h = fnv1a64_byte(0x1f, h);
  h = fnv1a64(qa_id, h);
  h ^= seed * kFnvPrime;
  return Rng(h);
}

ScoreTable load_score_table(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open score file: " + path.string());
  std::map<std::pair<std::string, std::string>, std::pair<double, int>> acc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    require(!j.is_discarded(), ErrorCode::Parse,
            path.string() + ":" + std::to_string(line_no) + ": invalid JSON row");
    require(j.contains("qa_id") && j.contains("method_id") && j.contains("score"),
            ErrorCode::Parse,
            path.string() + ":" + std::to_string(line_no) +
                ": row needs qa_id, method_id, score");
    auto& cell = acc[{j["qa_id"].get<std::string>(), j["method_id"].get<std::string>()}];
    cell.first += j["score"].get<double>();
    cell.second += 1;
  }
  require(!acc.empty(), ErrorCode::Parse, "score file has no rows: " + path.string());
  ScoreTable table;
  for (const auto& [key, cell] : acc) {
    table[key] = cell.first / static_cast<double>(cell.second);
  }
  return table;
}

std::map<std::string, std::string> load_domains(const fs::path& qa_file) {
  std::ifstream in(qa_file);
  require(in.good(), ErrorCode::Io, "cannot open QA file: " + qa_file.string());
  std::map<std::string, std::string> domains;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    const std::string qa_id = j.value("qa_id", std::string());
    const std::string domain = j.value("domain", std::string());
    if (!qa_id.empty() && !domain.empty()) domains[qa_id] = domain;
  }
  return domains;
}

}  // namespace

nlohmann::json cmd_index_build(const fs::path& collection_dir,
                               const fs::path& index_dir, const Config& config,
                               std::ostream& out) {
  const auto provider = make_embedding_provider(config);
  const BuildResult result = build_index(collection_dir, index_dir, config, *provider);
  nlohmann::json summary;
  summary["index_dir"] = result.dir.string();
  summary["rebuilt"] = result.rebuilt;
  summary["num_chunks"] = result.num_chunks;
  summary["num_clusters"] = result.num_clusters;
  out << summary.dump() << '\n';
  return summary;
}

nlohmann::json cmd_generate(const fs::path& index_dir, const fs::path& qa_file,
                            const std::string& method_id, const Config& config,
                            std::ostream& out) {
  const MethodId method = method_from_string(method_id);
  const Index index = open_index(index_dir);
  const std::vector<QARecord> records = load_qa_jsonl(qa_file);
  const auto provider = make_embedding_provider(config);
  const auto model = make_text_model(config);

  std::vector<MethodRun> runs(records.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      try {
        runs[i] = run_method(method, records[i], index, *provider, *model, config);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const int threads =
      std::max(1, std::min<int>(config.parallelism, static_cast<int>(records.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const MethodRun& run : runs) {
    write_insight_set(index_dir, run.set);
  }

  nlohmann::json summary;
  summary["method_id"] = method_id;
  summary["questions"] = records.size();
  summary["results_dir"] = (index_dir / "results").string();
  out << summary.dump() << '\n';
  return summary;
}

nlohmann::json cmd_eval(const std::string& protocol, const fs::path& results_dir,
                        const fs::path& qa_file, const Config& config,
                        const std::optional<fs::path>& out_file, std::ostream& out) {
  require(protocol == "set" || protocol == "insight", ErrorCode::Usage,
          "eval protocol must be 'set' or 'insight'");
  const fs::path root = resolve_index_root(results_dir);
  const auto results = load_results(root);
  const std::vector<QARecord> records = load_qa_jsonl(qa_file);
  std::map<std::string, const QARecord*> record_of;
  for (const QARecord& qa : records) record_of[qa.qa_id] = &qa;

  const auto judge = make_judge_model(config);
  const std::string judge_id = judge->model_id();

  std::ostringstream rows;
  std::size_t row_count = 0;
  auto emit = [&](nlohmann::json row) {
    rows << row.dump() << '\n';
    ++row_count;
  };

  for (const auto& [qa_id, sets] : results) {
    const auto it = record_of.find(qa_id);
    require(it != record_of.end(), ErrorCode::Contract,
            "results contain a question missing from the QA file: " + qa_id);
    const QARecord& qa = *it->second;
    Rng rng = make_question_rng("eval-" + protocol, qa_id, config.params.seed);

    if (protocol == "set") {
      const std::vector<JudgeScore> scores = judge_set_level(
          qa, sets, *judge, rng, config.set_criteria, config.max_retries);
      for (const JudgeScore& s : scores) {
        nlohmann::json row;
        row["qa_id"] = s.qa_id;
        row["method_id"] = s.method_id;
        row["judge_id"] = judge_id;
        row["protocol"] = "set";
        row["repeat"] = 0;
        row["score"] = s.score;
        row["seed"] = config.params.seed;
        row["rationale"] = s.rationale;
        emit(std::move(row));
      }
    } else {
      const InsightLevelResult result =
          judge_insight_level(qa, sets, *judge, rng, config.judge_repeats,
                              config.insight_criteria(), config.max_retries);
      for (std::size_t r = 0; r < result.repeats.size(); ++r) {
        for (const auto& [method_id, cell] : result.repeats[r]) {
          nlohmann::json row;
          row["qa_id"] = qa_id;
          row["method_id"] = method_id;
          row["judge_id"] = judge_id;
          row["protocol"] = "insight";
          row["repeat"] = static_cast<int>(r);
          row["insight_index"] = cell.first;
          row["score"] = cell.second;
          row["seed"] = config.params.seed;
          emit(std::move(row));
        }
      }
    }
  }

  const fs::path target =
      out_file ? *out_file : root / ("eval_" + protocol + ".jsonl");
  write_text_file(target, rows.str());

  nlohmann::json summary;
  summary["protocol"] = protocol;
  summary["rows"] = row_count;
  summary["file"] = target.string();
  out << summary.dump() << '\n';
  return summary;
}

nlohmann::json cmd_stats_agreement(const fs::path& judge_a_file,
                                   const fs::path& judge_b_file,
                                   const std::optional<fs::path>& qa_file,
                                   int family_count,
                                   const std::string& reference_method,
                                   double base_alpha,
                                   const std::optional<fs::path>& out_file,
                                   std::ostream& out) {
  const ScoreTable a = load_score_table(judge_a_file);
  const ScoreTable b = load_score_table(judge_b_file);
  std::map<std::string, std::string> domains;
  if (qa_file) domains = load_domains(*qa_file);

  const AgreementReport report =
      agreement_stats(a, b, domains, reference_method, base_alpha, family_count);

  nlohmann::json j;
  j["spearman_per_domain"] = report.spearman_per_domain;
  if (!report.spearman_per_domain.empty()) {
    std::vector<double> rhos;
    for (const auto& [domain, rho] : report.spearman_per_domain) rhos.push_back(rho);
    std::sort(rhos.begin(), rhos.end());
    const std::size_t n = rhos.size();
    j["median_spearman"] =
        n % 2 == 1 ? rhos[n / 2] : (rhos[n / 2 - 1] + rhos[n / 2]) / 2.0;
  }
  j["pairwise_ordering_agreement"] = report.pairwise_ordering_agreement;
  j["mean_top2_jaccard"] = report.mean_top2_jaccard;
  nlohmann::json tests = nlohmann::json::array();
  for (const WilcoxonComparison& cmp : report.wilcoxon) {
    tests.push_back({
        {"comparison_id", cmp.comparison_id},
        {"w", cmp.w},
        {"p", cmp.p},
        {"effect_r", cmp.effect_r},
        {"n", cmp.n},
        {"significant", cmp.significant},
    });
  }
  j["wilcoxon"] = std::move(tests);
  j["base_alpha"] = report.base_alpha;
  j["corrected_alpha"] = report.corrected_alpha;
  j["num_comparisons"] = report.num_comparisons;
  j["num_questions"] = report.num_questions;

  if (out_file) {
    write_json_file(*out_file, j);
    nlohmann::json summary;
    summary["file"] = out_file->string();
    out << summary.dump() << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  return j;
}

nlohmann::json cmd_trace_show(const fs::path& index_dir, const std::string& qa_id,
                              std::ostream& out) {
  const auto trace = read_trace(index_dir, qa_id);
  require(trace.has_value(), ErrorCode::Io,
          "no trace recorded for question " + qa_id);
  out << trace->dump(2) << '\n';
  return *trace;
}

}  // namespace insightgen::cli
