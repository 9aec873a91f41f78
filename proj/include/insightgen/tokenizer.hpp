#pragma once

#include <functional>
#include <string_view>

namespace insightgen {

// Token estimate used for all budgets; pluggable so a provider-specific
// tokenizer can be swapped in without touching chunking.
using TokenCounter = std::function<int(std::string_view)>;

int approx_token_count(std::string_view text);

const TokenCounter& default_token_counter();

}  // namespace insightgen
