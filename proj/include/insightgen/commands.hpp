#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "insightgen/config.hpp"

namespace insightgen::cli {

// Command implementations shared by the binary and the test harness. Each
// returns the machine-readable summary it prints.

nlohmann::json cmd_index_build(const std::filesystem::path& collection_dir,
                               const std::filesystem::path& index_dir,
                               const Config& config, std::ostream& out);

nlohmann::json cmd_generate(const std::filesystem::path& index_dir,
                            const std::filesystem::path& qa_file,
                            const std::string& method_id, const Config& config,
                            std::ostream& out);

nlohmann::json cmd_eval(const std::string& protocol,
                        const std::filesystem::path& results_dir,
                        const std::filesystem::path& qa_file, const Config& config,
                        const std::optional<std::filesystem::path>& out_file,
                        std::ostream& out);

nlohmann::json cmd_stats_agreement(
    const std::filesystem::path& judge_a_file,
    const std::filesystem::path& judge_b_file,
    const std::optional<std::filesystem::path>& qa_file, int family_count,
    const std::string& reference_method, double base_alpha,
    const std::optional<std::filesystem::path>& out_file, std::ostream& out);

nlohmann::json cmd_trace_show(const std::filesystem::path& index_dir,
                              const std::string& qa_id, std::ostream& out);

}  // namespace insightgen::cli
