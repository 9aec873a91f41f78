#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "insightgen/sentences.hpp"
#include "insightgen/tokenizer.hpp"

namespace insightgen {

struct Document {
  std::string doc_id;
  std::string collection_id;
  std::string title;
  std::string body;
  int token_count = 0;
};

struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  int ordinal = 0;
  std::string text;
  int token_count = 0;
  Span char_span;  // interval into the parent body
};

// "<doc_id>#<ordinal>" zero-padded so lexicographic order matches ordinal order.
std::string make_chunk_id(const std::string& doc_id, int ordinal);

// Greedy sentence packing: consecutive sentences are merged while the merged
// text stays within budget; sentences that alone exceed the budget are
// pre-split at whitespace into pieces that fit. Chunk spans are contiguous
// over the non-whitespace content of the input.
std::vector<Chunk> chunk_text(std::string_view text, int budget,
                              const TokenCounter& counter = default_token_counter(),
                              const std::string& doc_id = "text");

std::vector<Chunk> chunk_document(const Document& doc, int budget,
                                  const TokenCounter& counter = default_token_counter());

// Reads every .txt and .md file under root (non-recursive), doc_id = file
// stem, sorted by doc_id. Empty result is an error.
std::vector<Document> load_collection(const std::filesystem::path& root,
                                      const TokenCounter& counter = default_token_counter());

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace insightgen
