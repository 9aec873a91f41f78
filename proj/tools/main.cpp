#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "insightgen/commands.hpp"

namespace {

void print_error_line(const std::string& code, const std::string& message) {
  nlohmann::json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Related insight generation over document collections"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the global options after a subcommand too

  std::optional<std::string> config_file;
  std::optional<std::uint64_t> seed_override;
  bool mock = false;
  app.add_option("--config", config_file, "Config JSON file");
  app.add_option("--seed", seed_override, "Override the pipeline seed");
  app.add_flag("--mock", mock, "Use deterministic in-process providers");

  auto load = [&]() {
    std::optional<std::filesystem::path> path;
    if (config_file) path = *config_file;
    insightgen::Config config = insightgen::load_config(path);
    if (seed_override) config.params.seed = *seed_override;
    if (mock) config.mock = true;
    config.validate();
    return config;
  };

  // index build
  auto* index_cmd = app.add_subcommand("index", "Index maintenance");
  index_cmd->require_subcommand(1);
  auto* build_cmd = index_cmd->add_subcommand("build", "Chunk, embed and cluster a collection");
  std::string collection_dir, index_dir;
  build_cmd->add_option("--collection", collection_dir, "Directory of .txt/.md documents")
      ->required();
  build_cmd->add_option("--out", index_dir, "Index output directory")->required();
  build_cmd->callback([&]() {
    insightgen::cli::cmd_index_build(collection_dir, index_dir, load(), std::cout);
  });

  // insights generate
  auto* insights_cmd = app.add_subcommand("insights", "Insight generation");
  insights_cmd->require_subcommand(1);
  auto* gen_cmd = insights_cmd->add_subcommand("generate", "Generate insight sets for a QA file");
  std::string gen_index, gen_qa, gen_method;
  gen_cmd->add_option("--index", gen_index, "Index directory")->required();
  gen_cmd->add_option("--qa", gen_qa, "QA JSONL file")->required();
  gen_cmd->add_option("--method", gen_method,
                      "INSIGHTGEN, DIRECT, DIRECT_COT, SIM or SIM_COT")
      ->required();
  gen_cmd->callback([&]() {
    insightgen::cli::cmd_generate(gen_index, gen_qa, gen_method, load(), std::cout);
  });

  // eval set|insight
  auto* eval_cmd = app.add_subcommand("eval", "LLM-judge evaluation");
  eval_cmd->require_subcommand(1);
  std::string eval_results, eval_qa;
  std::optional<int> eval_repeats;
  std::optional<std::string> eval_judge_model;
  std::optional<std::string> eval_out;
  for (const std::string protocol : {"set", "insight"}) {
    auto* sub = eval_cmd->add_subcommand(
        protocol, protocol == "set" ? "Score whole insight sets"
                                    : "Score sampled single insights");
    sub->add_option("--results", eval_results, "Index directory or its results/")
        ->required();
    sub->add_option("--qa", eval_qa, "QA JSONL file")->required();
    sub->add_option("--repeats", eval_repeats, "Sampling repeats (insight protocol)");
    sub->add_option("--judge-model", eval_judge_model, "Judge model id override");
    sub->add_option("--out", eval_out, "Output JSONL path");
    sub->callback([&, protocol]() {
      insightgen::Config config = load();
      if (eval_repeats) config.judge_repeats = *eval_repeats;
      if (eval_judge_model) config.judge_model = *eval_judge_model;
      config.validate();
      std::optional<std::filesystem::path> out_path;
      if (eval_out) out_path = *eval_out;
      insightgen::cli::cmd_eval(protocol, eval_results, eval_qa, config, out_path,
                                std::cout);
    });
  }

  // stats agreement
  auto* stats_cmd = app.add_subcommand("stats", "Cross-judge statistics");
  stats_cmd->require_subcommand(1);
  auto* agree_cmd = stats_cmd->add_subcommand("agreement", "Compare two judges' score rows");
  std::string judge_a, judge_b;
  std::optional<std::string> stats_qa, stats_out;
  std::string reference = "INSIGHTGEN";
  int families = 0;
  double alpha = 0.05;
  agree_cmd->add_option("--judge-a", judge_a, "First judge's score JSONL")->required();
  agree_cmd->add_option("--judge-b", judge_b, "Second judge's score JSONL")->required();
  agree_cmd->add_option("--qa", stats_qa, "QA JSONL with per-question domains");
  agree_cmd->add_option("--families", families, "Bonferroni family size (0 = use comparison count)");
  agree_cmd->add_option("--reference", reference, "Reference method for paired tests");
  agree_cmd->add_option("--alpha", alpha, "Base significance level");
  agree_cmd->add_option("--out", stats_out, "Write the report here instead of stdout");
  agree_cmd->callback([&]() {
    std::optional<std::filesystem::path> qa_path, out_path;
    if (stats_qa) qa_path = *stats_qa;
    if (stats_out) out_path = *stats_out;
    insightgen::cli::cmd_stats_agreement(judge_a, judge_b, qa_path, families,
                                         reference, alpha, out_path, std::cout);
  });

  // trace show
  auto* trace_cmd = app.add_subcommand("trace", "Selection traces");
  trace_cmd->require_subcommand(1);
  auto* show_cmd = trace_cmd->add_subcommand("show", "Print the selection trace for a question");
  std::string trace_index, trace_qa_id;
  show_cmd->add_option("--index", trace_index, "Index directory")->required();
  show_cmd->add_option("--qa-id", trace_qa_id, "Question id")->required();
  show_cmd->callback([&]() {
    insightgen::cli::cmd_trace_show(trace_index, trace_qa_id, std::cout);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const insightgen::Error& e) {
    print_error_line(insightgen::error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error_line("internal", e.what());
    return 1;
  }
  return 0;
}
