#pragma once

#include <optional>
#include <string>
#include <vector>

#include "insightgen/config.hpp"
#include "insightgen/context.hpp"
#include "insightgen/engine.hpp"
#include "insightgen/store.hpp"

namespace insightgen {

enum class MethodId { InsightGen, Direct, DirectCot, Sim, SimCot };

inline constexpr std::array<MethodId, 5> kAllMethods = {
    MethodId::InsightGen, MethodId::Direct, MethodId::DirectCot,
    MethodId::Sim, MethodId::SimCot};

std::string to_string(MethodId method);
MethodId method_from_string(const std::string& s);

// Rebuilds per-document text from the chunk store (chunk texts joined by a
// single space, ordinal order).
std::vector<Document> documents_from_chunks(const Index& index);

// Splits the budget evenly across documents; each document contributes its
// largest sentence-bounded prefix that fits the per-document share. A budget
// below the document count is degenerate.
std::string direct_context(const std::vector<Document>& docs, int budget,
                           const TokenCounter& counter = default_token_counter());

// Concatenates all documents in doc_id order and cuts at the last sentence
// boundary within the budget. Budget 0 degenerates to an empty context.
std::string truncated_global_context(const std::vector<Document>& docs, int budget,
                                     const TokenCounter& counter = default_token_counter());

// Exact k-nearest chunks by cosine against the query embedding, descending
// score, ties by ascending chunk_id.
std::vector<const Chunk*> similarity_retrieve(const std::string& query,
                                              int num_chunks, const Index& index,
                                              EmbeddingProvider& provider);

struct MethodRun {
  InsightSet set;
  std::optional<ContextSelection> selection;  // set for the graph-based method
  int num_context_chunks = 0;
};

// Runs one method end to end for one question. All methods share the same
// generation templates; the single-prompt methods skip the intent step. The
// similarity baselines match their retrieval size to the graph-based
// selection for the same question, which is computed (and its trace
// persisted) on demand.
MethodRun run_method(MethodId method, const QARecord& qa, const Index& index,
                     EmbeddingProvider& provider, TextModel& model,
                     const Config& config);

}  // namespace insightgen
