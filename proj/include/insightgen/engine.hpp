#pragma once

#include <string>
#include <string_view>

#include "insightgen/insight.hpp"
#include "insightgen/text_model.hpp"

namespace insightgen {

// True when a and b share a verbatim common substring of at least min_len
// characters.
bool shares_long_substring(std::string_view a, std::string_view b,
                           std::size_t min_len);

// Step one of two-step generation. Malformed replies are retried with a
// repair prompt up to max_retries extra attempts.
IntentProfile infer_intent(const std::string& question, const std::string& answer,
                           TextModel& model, int max_retries = 2);

// Generates an insight set from an already-assembled context. Runs the
// two-step prompt when an intent profile is given, the single prompt
// otherwise. Replies longer than max_insights are truncated to the first
// max_insights; any insight whose body repeats >= 200 consecutive answer
// characters is dropped; an empty remainder is an error.
InsightSet generate_insights(const std::string& qa_id, const std::string& method_id,
                             const std::string& question, const std::string& answer,
                             const std::string& context,
                             const IntentProfile* intent, TextModel& model,
                             int max_insights, int max_retries = 2);

inline constexpr std::size_t kRepetitionGuardChars = 200;

}  // namespace insightgen
