#include "insightgen/sentences.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_set>

namespace insightgen {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

const std::unordered_set<std::string>& abbreviation_stems() {
  static const std::unordered_set<std::string> stems = {
      "etc", "vs", "cf", "fig", "figs", "eq", "eqs", "sec", "ch", "al",
      "dr", "mr", "mrs", "ms", "prof", "st", "vol", "approx", "dept",
      "inc", "ltd", "jr", "sr", "resp",
  };
  return stems;
}

// True when the '.' at dot_pos ends a sentence rather than an
// abbreviation, initial or dotted acronym.
bool dot_is_boundary(std::string_view text, std::size_t dot_pos) {
  std::size_t b = dot_pos;
  while (b > 0 && !is_ws(text[b - 1])) --b;
  std::string stem(text.substr(b, dot_pos - b));
  if (stem.empty()) return true;
  if (stem.find('.') != std::string::npos) return false;
  std::transform(stem.begin(), stem.end(), stem.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  while (!stem.empty() && !std::isalnum(static_cast<unsigned char>(stem.front())))
    stem.erase(stem.begin());
  if (stem.size() == 1 && std::isalpha(static_cast<unsigned char>(stem[0]))) return false;
  return abbreviation_stems().count(stem) == 0;
}

}  // namespace

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> spans;
  const std::size_t n = text.size();
  std::size_t pos = 0;
  while (pos < n) {
    while (pos < n && is_ws(text[pos])) ++pos;
    if (pos >= n) break;
    const std::size_t start = pos;
    std::size_t end = n;
    std::size_t i = pos;
    while (i < n) {
      if (!is_terminator(text[i])) {
        ++i;
        continue;
      }
      std::size_t run_end = i;
      while (run_end + 1 < n && is_terminator(text[run_end + 1])) ++run_end;
      std::size_t close = run_end;
      while (close + 1 < n && is_closer(text[close + 1])) ++close;
      const bool at_break = (close + 1 >= n) || is_ws(text[close + 1]);
      const bool single_dot = (run_end == i && text[i] == '.');
      if (at_break && (!single_dot || dot_is_boundary(text, i))) {
        end = close + 1;
        break;
      }
      i = run_end + 1;
    }
    while (end > start && is_ws(text[end - 1])) --end;
    spans.push_back(Span{start, end});
    pos = end;
  }
  return spans;
}

}  // namespace insightgen
