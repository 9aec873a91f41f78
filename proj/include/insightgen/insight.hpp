#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace insightgen {

enum class InsightType {
  MissingInformation,
  NewIdea,
  AlternateFraming,
  MindMap,
  PotentialIssue,
  InterestingFact,
  ShortQuiz,
  RealWorldApplication,
  TradeoffAnalysis,
};

inline constexpr std::array<InsightType, 9> kAllInsightTypes = {
    InsightType::MissingInformation, InsightType::NewIdea,
    InsightType::AlternateFraming,   InsightType::MindMap,
    InsightType::PotentialIssue,     InsightType::InterestingFact,
    InsightType::ShortQuiz,          InsightType::RealWorldApplication,
    InsightType::TradeoffAnalysis,
};

std::string_view to_string(InsightType type);
std::optional<InsightType> insight_type_from_string(std::string_view s);

struct SelfScores {
  double relevance = 0.0;
  double novelty = 0.0;
  double usefulness = 0.0;
  double intent_alignment = 0.0;

  bool operator==(const SelfScores&) const = default;
};

struct IntentProfile {
  std::string persona;
  std::vector<std::string> goals;
  std::vector<std::string> intents;
};

struct Insight {
  InsightType type = InsightType::NewIdea;
  std::string hook;
  std::string body;
  std::string takeaway;
  std::string justification;
  SelfScores self_scores;

  bool operator==(const Insight&) const = default;
};

struct InsightSet {
  std::string qa_id;
  std::string method_id;
  std::string template_version;
  std::vector<Insight> insights;
};

// Parses a model reply (optionally fenced) into insights. The reply must be
// a JSON array of objects with type, hook, body, takeaway, justification and
// the four self-score keys; scores live in [0, 5], hook and body are
// nonempty, unknown fields are ignored. Violations are reported with the
// offending field path.
std::vector<Insight> parse_insights(const std::string& raw);

nlohmann::json to_json(const Insight& insight);
nlohmann::json to_json(const InsightSet& set);
Insight insight_from_json(const nlohmann::json& j, const std::string& path);
InsightSet insight_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IntentProfile& profile);
IntentProfile intent_profile_from_json(const nlohmann::json& j);

// Strips a leading/trailing markdown code fence if present.
std::string strip_code_fence(const std::string& raw);

}  // namespace insightgen
