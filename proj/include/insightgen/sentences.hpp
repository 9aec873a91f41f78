#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace insightgen {

// Half-open character interval into a source string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
  std::size_t size() const { return end - begin; }
};

// Splits text into sentence spans. A sentence ends at '.', '!' or '?'
// followed by whitespace or end of input; trailing text without a
// terminator forms a final sentence. Common abbreviations and single-letter
// initials do not end a sentence. Spans cover every non-whitespace
// character and never overlap.
std::vector<Span> split_sentences(std::string_view text);

}  // namespace insightgen
