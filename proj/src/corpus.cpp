#include "insightgen/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "insightgen/errors.hpp"

namespace insightgen {

namespace {

bool is_ws(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Largest prefix length of text[begin, end) whose token count fits budget.
std::size_t max_fitting_prefix(std::string_view text, std::size_t begin,
                               std::size_t end, int budget,
                               const TokenCounter& counter) {
  std::size_t lo = 1;
  std::size_t hi = end - begin;
  std::size_t best = 1;
  while (lo <= hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (counter(text.substr(begin, mid)) <= budget) {
      best = mid;
      lo = mid + 1;
    } else {
      if (mid == 1) break;
      hi = mid - 1;
    }
  }
  return best;
}

// Splits one oversized sentence into pieces that each fit the budget,
// cutting at the last whitespace before the boundary when one exists.
std::vector<Span> hard_split(std::string_view text, Span sentence, int budget,
                             const TokenCounter& counter) {
  std::vector<Span> pieces;
  std::size_t cur = sentence.begin;
  while (cur < sentence.end) {
    if (counter(text.substr(cur, sentence.end - cur)) <= budget) {
      pieces.push_back(Span{cur, sentence.end});
      break;
    }
    const std::size_t fit = max_fitting_prefix(text, cur, sentence.end, budget, counter);
    std::size_t cut = cur + fit;
    for (std::size_t p = cut; p > cur + 1; --p) {
      if (is_ws(text[p - 1])) {
        cut = p - 1;
        break;
      }
    }
    std::size_t piece_end = cut;
    while (piece_end > cur && is_ws(text[piece_end - 1])) --piece_end;
    if (piece_end == cur) piece_end = cur + fit;
    pieces.push_back(Span{cur, piece_end});
    cur = piece_end;
    while (cur < sentence.end && is_ws(text[cur])) ++cur;
  }
  return pieces;
}

}  // namespace

std::string make_chunk_id(const std::string& doc_id, int ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%05d", ordinal);
  return doc_id + buf;
}

std::vector<Chunk> chunk_text(std::string_view text, int budget,
                              const TokenCounter& counter,
                              const std::string& doc_id) {
  require(budget >= 1, ErrorCode::Contract, "chunk_text: budget must be >= 1");
  const std::vector<Span> sentences = split_sentences(text);
  std::vector<Span> pieces;
  pieces.reserve(sentences.size());
  for (const Span& s : sentences) {
    if (counter(text.substr(s.begin, s.size())) > budget) {
      const std::vector<Span> split = hard_split(text, s, budget, counter);
      pieces.insert(pieces.end(), split.begin(), split.end());
    } else {
      pieces.push_back(s);
    }
  }

  std::vector<Chunk> chunks;
  if (pieces.empty()) return chunks;

  Span open = pieces.front();
  auto flush = [&]() {
    Chunk c;
    c.doc_id = doc_id;
    c.ordinal = static_cast<int>(chunks.size());
    c.chunk_id = make_chunk_id(doc_id, c.ordinal);
    c.text = std::string(text.substr(open.begin, open.size()));
    c.token_count = counter(c.text);
    c.char_span = open;
    chunks.push_back(std::move(c));
  };
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    const Span merged{open.begin, pieces[i].end};
    if (counter(text.substr(merged.begin, merged.size())) <= budget) {
      open.end = pieces[i].end;
    } else {
      flush();
      open = pieces[i];
    }
  }
  flush();
  return chunks;
}

std::vector<Chunk> chunk_document(const Document& doc, int budget,
                                  const TokenCounter& counter) {
  return chunk_text(doc.body, budget, counter, doc.doc_id);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  require(!in.bad(), ErrorCode::Io, "read failed: " + path.string());
  return std::move(buf).str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot open file for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

std::vector<Document> load_collection(const std::filesystem::path& root,
                                      const TokenCounter& counter) {
  namespace fs = std::filesystem;
  require(fs::exists(root) && fs::is_directory(root), ErrorCode::Io,
          "collection directory not found: " + root.string());
  fs::path normalized = root;
  if (normalized.filename().empty()) normalized = normalized.parent_path();
  const std::string collection_id = normalized.filename().string();

  std::vector<Document> docs;
  std::set<std::string> seen;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".txt" && ext != ".md") continue;
    Document doc;
    doc.doc_id = entry.path().stem().string();
    doc.collection_id = collection_id;
    doc.title = doc.doc_id;
    doc.body = read_text_file(entry.path());
    doc.token_count = counter(doc.body);
    require(seen.insert(doc.doc_id).second, ErrorCode::Contract,
            "duplicate doc_id in collection: " + doc.doc_id);
    docs.push_back(std::move(doc));
  }
  require(!docs.empty(), ErrorCode::EmptyCollection,
          "no .txt or .md documents under " + root.string());
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return docs;
}

}  // namespace insightgen
