#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "insightgen/insight.hpp"

namespace insightgen::prompts {

inline constexpr std::string_view kTemplateVersion = "v1";
inline constexpr std::string_view kContextBegin = "CONTEXT_BEGIN";
inline constexpr std::string_view kContextEnd = "CONTEXT_END";

// Machine-readable first line of every template; the mock model dispatches
// on it.
inline constexpr std::string_view kTaskIntent = "intent_profile";
inline constexpr std::string_view kTaskGeneration = "insight_generation";
inline constexpr std::string_view kTaskSetJudgement = "set_judgement";
inline constexpr std::string_view kTaskInsightJudgement = "insight_judgement";

// Replaces every {{name}} with vars.at(name); unknown placeholders are an
// error so template drift is caught early.
std::string render(std::string_view tmpl,
                   const std::map<std::string, std::string>& vars);

std::string render_intent_prompt(const std::string& question,
                                 const std::string& answer);

// One generation template per step count. The two-step template is shared
// verbatim by every chain-of-thought method; only the text between the
// context delimiters differs.
std::string render_generation_prompt(bool two_step, const std::string& question,
                                     const std::string& answer,
                                     const std::string& context,
                                     const std::string& intent_json,
                                     int max_insights);

std::string render_insight_for_judging(const Insight& insight);
std::string render_set_for_judging(const InsightSet& set);

// Candidates are (label, rendered text) in presentation order.
std::string render_set_judge_prompt(
    const std::string& question, const std::string& answer,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const std::vector<std::string>& criteria);

std::string render_insight_judge_prompt(
    const std::string& question, const std::string& answer,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const std::vector<std::string>& criteria);

std::string make_repair_prompt(const std::string& original,
                               const std::string& error);

// Extracts the value of a "KEY: value" line, empty if absent.
std::string find_tagged_line(std::string_view text, std::string_view key);

}  // namespace insightgen::prompts
