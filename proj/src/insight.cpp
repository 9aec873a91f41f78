#include "insightgen/insight.hpp"

#include <sstream>

#include "insightgen/errors.hpp"

namespace insightgen {

std::string_view to_string(InsightType type) {
  switch (type) {
    case InsightType::MissingInformation: return "MISSING_INFORMATION";
    case InsightType::NewIdea: return "NEW_IDEA";
    case InsightType::AlternateFraming: return "ALTERNATE_FRAMING";
    case InsightType::MindMap: return "MIND_MAP";
    case InsightType::PotentialIssue: return "POTENTIAL_ISSUE";
    case InsightType::InterestingFact: return "INTERESTING_FACT";
    case InsightType::ShortQuiz: return "SHORT_QUIZ";
    case InsightType::RealWorldApplication: return "REAL_WORLD_APPLICATION";
    case InsightType::TradeoffAnalysis: return "TRADEOFF_ANALYSIS";
  }
  return "NEW_IDEA";
}

std::optional<InsightType> insight_type_from_string(std::string_view s) {
  for (const InsightType t : kAllInsightTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::string strip_code_fence(const std::string& raw) {
  std::string s = raw;
  auto trim = [](std::string& x) {
    const auto b = x.find_first_not_of(" \t\r\n");
    const auto e = x.find_last_not_of(" \t\r\n");
    x = (b == std::string::npos) ? std::string() : x.substr(b, e - b + 1);
  };
  trim(s);
  if (s.rfind("```", 0) == 0) {
    const auto nl = s.find('\n');
    if (nl != std::string::npos) {
      s = s.substr(nl + 1);
      const auto end = s.rfind("```");
      if (end != std::string::npos) s = s.substr(0, end);
      trim(s);
    }
  }
  return s;
}

namespace {

double score_field(const nlohmann::json& scores, const std::string& key,
                   const std::string& path) {
  require(scores.contains(key), ErrorCode::Parse,
          path + "." + key + ": missing self-score");
  const auto& v = scores[key];
  require(v.is_number(), ErrorCode::Parse, path + "." + key + ": score must be a number");
  const double score = v.get<double>();
  if (score < 0.0 || score > 5.0) {
    std::ostringstream msg;
    msg << path << "." << key << ": value " << score << " out of range [0,5]";
    raise(ErrorCode::Parse, msg.str());
  }
  return score;
}

std::string string_field(const nlohmann::json& j, const std::string& key,
                         const std::string& path, bool must_be_nonempty) {
  require(j.contains(key), ErrorCode::Parse, path + "." + key + ": missing field");
  require(j[key].is_string(), ErrorCode::Parse, path + "." + key + ": must be a string");
  std::string value = j[key].get<std::string>();
  if (must_be_nonempty) {
    require(!value.empty(), ErrorCode::Parse, path + "." + key + ": must be nonempty");
  }
  return value;
}

}  // namespace

Insight insight_from_json(const nlohmann::json& j, const std::string& path) {
  require(j.is_object(), ErrorCode::Parse, path + ": insight must be an object");
  Insight insight;
  const std::string type_str = string_field(j, "type", path, true);
  const auto type = insight_type_from_string(type_str);
  require(type.has_value(), ErrorCode::Parse,
          path + ".type: unknown insight type '" + type_str + "'");
  insight.type = *type;
  insight.hook = string_field(j, "hook", path, true);
  insight.body = string_field(j, "body", path, true);
  insight.takeaway = string_field(j, "takeaway", path, false);
  insight.justification = string_field(j, "justification", path, false);
  require(j.contains("self_scores") && j["self_scores"].is_object(), ErrorCode::Parse,
          path + ".self_scores: missing object");
  const auto& scores = j["self_scores"];
  insight.self_scores.relevance = score_field(scores, "relevance", path + ".self_scores");
  insight.self_scores.novelty = score_field(scores, "novelty", path + ".self_scores");
  insight.self_scores.usefulness = score_field(scores, "usefulness", path + ".self_scores");
  insight.self_scores.intent_alignment =
      score_field(scores, "intent_alignment", path + ".self_scores");
  return insight;
}

std::vector<Insight> parse_insights(const std::string& raw) {
  const std::string body = strip_code_fence(raw);
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  require(!j.is_discarded(), ErrorCode::Parse, "insights: reply is not valid JSON");
  require(j.is_array(), ErrorCode::Parse, "insights: reply must be a JSON array");
  std::vector<Insight> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::ostringstream path;
    path << "insights[" << i << "]";
    out.push_back(insight_from_json(j[i], path.str()));
  }
  return out;
}

nlohmann::json to_json(const Insight& insight) {
  nlohmann::json j;
  j["type"] = std::string(to_string(insight.type));
  j["hook"] = insight.hook;
  j["body"] = insight.body;
  j["takeaway"] = insight.takeaway;
  j["justification"] = insight.justification;
  j["self_scores"] = {
      {"relevance", insight.self_scores.relevance},
      {"novelty", insight.self_scores.novelty},
      {"usefulness", insight.self_scores.usefulness},
      {"intent_alignment", insight.self_scores.intent_alignment},
  };
  return j;
}

nlohmann::json to_json(const InsightSet& set) {
  nlohmann::json j;
  j["qa_id"] = set.qa_id;
  j["method_id"] = set.method_id;
  j["template_version"] = set.template_version;
  j["insights"] = nlohmann::json::array();
  for (const Insight& insight : set.insights) {
    j["insights"].push_back(to_json(insight));
  }
  return j;
}

InsightSet insight_set_from_json(const nlohmann::json& j) {
  InsightSet set;
  set.qa_id = j.at("qa_id").get<std::string>();
  set.method_id = j.at("method_id").get<std::string>();
  set.template_version = j.value("template_version", std::string());
  const auto& arr = j.at("insights");
  require(arr.is_array(), ErrorCode::Parse, "insight set: insights must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    std::ostringstream path;
    path << "insights[" << i << "]";
    set.insights.push_back(insight_from_json(arr[i], path.str()));
  }
  return set;
}

nlohmann::json to_json(const IntentProfile& profile) {
  nlohmann::json j;
  j["persona"] = profile.persona;
  j["goals"] = profile.goals;
  j["intents"] = profile.intents;
  return j;
}

IntentProfile intent_profile_from_json(const nlohmann::json& j) {
  require(j.is_object(), ErrorCode::Parse, "intent profile must be an object");
  IntentProfile profile;
  require(j.contains("persona") && j["persona"].is_string(), ErrorCode::Parse,
          "intent profile: persona missing");
  profile.persona = j["persona"].get<std::string>();
  require(!profile.persona.empty(), ErrorCode::Parse,
          "intent profile: persona must be nonempty");
  require(j.contains("goals") && j["goals"].is_array(), ErrorCode::Parse,
          "intent profile: goals missing");
  for (const auto& g : j["goals"]) {
    require(g.is_string(), ErrorCode::Parse, "intent profile: goals must be strings");
    profile.goals.push_back(g.get<std::string>());
  }
  require(!profile.goals.empty(), ErrorCode::Parse,
          "intent profile: at least one goal required");
  if (j.contains("intents")) {
    require(j["intents"].is_array(), ErrorCode::Parse,
            "intent profile: intents must be an array");
    for (const auto& g : j["intents"]) {
      require(g.is_string(), ErrorCode::Parse, "intent profile: intents must be strings");
      profile.intents.push_back(g.get<std::string>());
    }
  }
  return profile;
}

}  // namespace insightgen
