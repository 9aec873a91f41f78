#include <doctest.h>

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "insightgen/errors.hpp"
#include "insightgen/insight.hpp"
#include "insightgen/rng.hpp"
#include "test_support.hpp"

using namespace insightgen;
using nlohmann::json;
using testutil::thrown_code;

namespace {

json valid_insight_json() {
  return json{{"type", "NEW_IDEA"},
              {"hook", "A hook"},
              {"body", "A body with substance."},
              {"takeaway", "Remember this."},
              {"justification", "Grounded in the context."},
              {"self_scores",
               {{"relevance", 4.0},
                {"novelty", 3.5},
                {"usefulness", 2.0},
                {"intent_alignment", 5.0}}}};
}

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Insight random_insight(Rng& rng) {
  Insight ins;
  ins.type = kAllInsightTypes[uniform_below(rng, kAllInsightTypes.size())];
  ins.hook = "hook " + std::to_string(rng());
  ins.body = "body " + std::to_string(rng());
  if (uniform_below(rng, 2)) ins.takeaway = "takeaway " + std::to_string(rng());
  if (uniform_below(rng, 2)) ins.justification = "because " + std::to_string(rng());
  ins.self_scores.relevance = static_cast<double>(uniform_below(rng, 51)) / 10.0;
  ins.self_scores.novelty = static_cast<double>(uniform_below(rng, 51)) / 10.0;
  ins.self_scores.usefulness = static_cast<double>(uniform_below(rng, 51)) / 10.0;
  ins.self_scores.intent_alignment = static_cast<double>(uniform_below(rng, 51)) / 10.0;
  return ins;
}

}  // namespace

TEST_CASE("type names round-trip and unknown names are rejected") {
  for (const InsightType t : kAllInsightTypes) {
    const auto back = insight_type_from_string(to_string(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
  CHECK(!insight_type_from_string("NOT_A_TYPE").has_value());
  CHECK(!insight_type_from_string("new_idea").has_value());
  CHECK(!insight_type_from_string("").has_value());
}

TEST_CASE("a well-formed reply parses into insights") {
  json arr = json::array({valid_insight_json(), valid_insight_json()});
  arr[1]["type"] = "SHORT_QUIZ";
  arr[1]["takeaway"] = "";
  const std::vector<Insight> out = parse_insights(arr.dump());
  REQUIRE(out.size() == 2);
  CHECK(out[0].type == InsightType::NewIdea);
  CHECK(out[0].hook == "A hook");
  CHECK(out[0].self_scores.novelty == 3.5);
  CHECK(out[1].type == InsightType::ShortQuiz);
  CHECK(out[1].takeaway.empty());
}

TEST_CASE("parse failures name the offending field") {
  json bad_score = json::array({valid_insight_json()});
  bad_score[0]["self_scores"]["novelty"] = 5.5;
  CHECK(thrown_code([&] { parse_insights(bad_score.dump()); }) == ErrorCode::Parse);
  const std::string msg = error_message([&] { parse_insights(bad_score.dump()); });
  CHECK(msg.find("self_scores.novelty") != std::string::npos);
  CHECK(msg.find("out of range") != std::string::npos);

  json negative = json::array({valid_insight_json()});
  negative[0]["self_scores"]["relevance"] = -0.1;
  CHECK(thrown_code([&] { parse_insights(negative.dump()); }) == ErrorCode::Parse);

  json empty_hook = json::array({valid_insight_json()});
  empty_hook[0]["hook"] = "";
  CHECK(error_message([&] { parse_insights(empty_hook.dump()); }).find("hook") !=
        std::string::npos);

  json bad_type = json::array({valid_insight_json()});
  bad_type[0]["type"] = "BRAINSTORM";
  CHECK(error_message([&] { parse_insights(bad_type.dump()); }).find("unknown insight type") !=
        std::string::npos);

  json missing_scores = json::array({valid_insight_json()});
  missing_scores[0].erase("self_scores");
  CHECK(thrown_code([&] { parse_insights(missing_scores.dump()); }) == ErrorCode::Parse);

  json string_score = json::array({valid_insight_json()});
  string_score[0]["self_scores"]["usefulness"] = "high";
  CHECK(thrown_code([&] { parse_insights(string_score.dump()); }) == ErrorCode::Parse);

  // the second element is the broken one and the path says so
  json second_bad = json::array({valid_insight_json(), valid_insight_json()});
  second_bad[1]["body"] = "";
  CHECK(error_message([&] { parse_insights(second_bad.dump()); }).find("insights[1]") !=
        std::string::npos);
}

TEST_CASE("non-array replies and broken JSON are rejected") {
  CHECK(thrown_code([] { parse_insights("{\"not\":\"an array\"}"); }) == ErrorCode::Parse);
  CHECK(thrown_code([] { parse_insights("not json at all"); }) == ErrorCode::Parse);
  CHECK(thrown_code([] { parse_insights(""); }) == ErrorCode::Parse);
  // an empty array is valid and yields no insights
  CHECK(parse_insights("[]").empty());
}

TEST_CASE("code fences around the payload are stripped") {
  const json arr = json::array({valid_insight_json()});
  const std::string fenced = "```json\n" + arr.dump(2) + "\n```";
  CHECK(parse_insights(fenced).size() == 1);
  const std::string bare_fence = "```\n" + arr.dump() + "\n```";
  CHECK(parse_insights(bare_fence).size() == 1);
  const std::string padded = "\n  " + arr.dump() + "  \n";
  CHECK(parse_insights(padded).size() == 1);

  CHECK(strip_code_fence("```json\n[1]\n```") == "[1]");
  CHECK(strip_code_fence("  plain  ") == "plain");
  CHECK(strip_code_fence("") == "");
}

TEST_CASE("insights survive randomized serialization round-trips") {
  Rng rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    const Insight ins = random_insight(rng);
    const Insight back = insight_from_json(to_json(ins), "insights[0]");
    CAPTURE(trial);
    CHECK(back == ins);
  }
}

TEST_CASE("insight sets round-trip with identity fields") {
  Rng rng(72);
  InsightSet set;
  set.qa_id = "q42";
  set.method_id = "INSIGHTGEN";
  set.template_version = "v1";
  for (int i = 0; i < 4; ++i) set.insights.push_back(random_insight(rng));
  const InsightSet back = insight_set_from_json(to_json(set));
  CHECK(back.qa_id == set.qa_id);
  CHECK(back.method_id == set.method_id);
  CHECK(back.template_version == set.template_version);
  CHECK(back.insights == set.insights);
}

TEST_CASE("unknown fields in a reply are ignored") {
  json extra = json::array({valid_insight_json()});
  extra[0]["confidence"] = 0.9;
  extra[0]["self_scores"]["charisma"] = 11.0;
  const std::vector<Insight> out = parse_insights(extra.dump());
  REQUIRE(out.size() == 1);
  CHECK(out[0].self_scores.relevance == 4.0);
}

TEST_CASE("intent profiles validate persona and goals") {
  json good;
  good["persona"] = "curious learner";
  good["goals"] = json::array({"grasp the basics"});
  good["intents"] = json::array({"explore"});
  const IntentProfile profile = intent_profile_from_json(good);
  CHECK(profile.persona == "curious learner");
  REQUIRE(profile.goals.size() == 1);
  REQUIRE(profile.intents.size() == 1);

  // intents are optional
  json no_intents = good;
  no_intents.erase("intents");
  CHECK(intent_profile_from_json(no_intents).intents.empty());

  json empty_persona = good;
  empty_persona["persona"] = "";
  CHECK(thrown_code([&] { intent_profile_from_json(empty_persona); }) == ErrorCode::Parse);

  json no_goals = good;
  no_goals["goals"] = json::array();
  CHECK(thrown_code([&] { intent_profile_from_json(no_goals); }) == ErrorCode::Parse);

  CHECK(thrown_code([] { intent_profile_from_json(json::array()); }) == ErrorCode::Parse);

  // round-trip
  const IntentProfile back = intent_profile_from_json(to_json(profile));
  CHECK(back.persona == profile.persona);
  CHECK(back.goals == profile.goals);
  CHECK(back.intents == profile.intents);
}
