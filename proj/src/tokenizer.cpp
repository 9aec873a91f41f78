#include "insightgen/tokenizer.hpp"

namespace insightgen {

int approx_token_count(std::string_view text) {
  if (text.empty()) return 0;
  return static_cast<int>((text.size() + 3) / 4);
}

const TokenCounter& default_token_counter() {
  static const TokenCounter counter = [](std::string_view text) {
    return approx_token_count(text);
  };
  return counter;
}

}  // namespace insightgen
