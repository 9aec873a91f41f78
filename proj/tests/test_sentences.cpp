#include <doctest.h>

#include <cctype>
#include <string>
#include <vector>

#include "insightgen/rng.hpp"
#include "insightgen/sentences.hpp"

using namespace insightgen;

namespace {

std::vector<std::string> sentence_texts(const std::string& text) {
  std::vector<std::string> out;
  for (const Span& s : split_sentences(text)) {
    out.push_back(text.substr(s.begin, s.size()));
  }
  return out;
}

}  // namespace

TEST_CASE("empty text has no sentences") {
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("   \n\t ").empty());
}

TEST_CASE("terminators split sentences") {
  CHECK(sentence_texts("One. Two!") == std::vector<std::string>{"One.", "Two!"});
}

TEST_CASE("text without a terminator is one sentence") {
  CHECK(sentence_texts("no terminator") == std::vector<std::string>{"no terminator"});
}

TEST_CASE("hand-enumerated sentence fixture") {
  struct Case {
    std::string text;
    std::vector<std::string> expected;
  };
  const std::vector<Case> cases = {
      {"One. Two!", {"One.", "Two!"}},
      {"Is it done? Yes.", {"Is it done?", "Yes."}},
      {"no terminator", {"no terminator"}},
      {"Trailing spaces.   ", {"Trailing spaces."}},
      {"  Leading spaces. Second one.", {"Leading spaces.", "Second one."}},
      {"Numbers like 3.14 stay intact. Next.", {"Numbers like 3.14 stay intact.", "Next."}},
      {"We cite et al. here and move on. Done.",
       {"We cite et al. here and move on.", "Done."}},
      {"Use e.g. an example. Then stop.", {"Use e.g. an example.", "Then stop."}},
      {"Dr. Smith arrived. He sat down.", {"Dr. Smith arrived.", "He sat down."}},
      {"J. K. Rowling wrote it. Indeed.", {"J. K. Rowling wrote it.", "Indeed."}},
      {"He said \"Stop.\" Then he left.", {"He said \"Stop.\"", "Then he left."}},
      {"(Parenthetical.) Following.", {"(Parenthetical.)", "Following."}},
      {"Lines\nbreak. Still splits.", {"Lines\nbreak.", "Still splits."}},
      {"Tabs\tinside. Fine.", {"Tabs\tinside.", "Fine."}},
      {"Shout!! Twice?", {"Shout!!", "Twice?"}},
      {"Ellipsis... then more. End.", {"Ellipsis...", "then more.", "End."}},
      {"Versus vs. the other side. Next.", {"Versus vs. the other side.", "Next."}},
      {"See fig. 4 for details. Moving on.", {"See fig. 4 for details.", "Moving on."}},
      {"One.", {"One."}},
      {"Last has no dot. trailing words",
       {"Last has no dot.", "trailing words"}},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    CHECK(sentence_texts(c.text) == c.expected);
  }
}

TEST_CASE("spans cover all non-whitespace characters without overlap") {
  Rng rng(11);
  const std::string pieces[] = {"word", "Mr.", "x", "3.5", "end.", "why?", "now!", " "};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const auto parts = 1 + uniform_below(rng, 40);
    for (std::uint64_t i = 0; i < parts; ++i) {
      text += pieces[uniform_below(rng, 8)];
      text += ' ';
    }
    const std::vector<Span> spans = split_sentences(text);
    std::size_t cursor = 0;
    for (const Span& s : spans) {
      REQUIRE(s.begin < s.end);
      REQUIRE(s.begin >= cursor);
      // only whitespace between consecutive spans
      for (std::size_t p = cursor; p < s.begin; ++p) {
        CHECK(std::isspace(static_cast<unsigned char>(text[p])));
      }
      CHECK_FALSE(std::isspace(static_cast<unsigned char>(text[s.begin])));
      CHECK_FALSE(std::isspace(static_cast<unsigned char>(text[s.end - 1])));
      cursor = s.end;
    }
    for (std::size_t p = cursor; p < text.size(); ++p) {
      CHECK(std::isspace(static_cast<unsigned char>(text[p])));
    }
  }
}
