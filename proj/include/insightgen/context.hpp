#pragma once

#include <set>
#include <string>
#include <vector>

#include "insightgen/corpus.hpp"
#include "insightgen/embedding.hpp"
#include "insightgen/hyperparams.hpp"
#include "insightgen/theme_graph.hpp"

namespace insightgen {

struct Index;

struct ContextSelection {
  std::string qa_id;
  std::set<int> answer_clusters;
  std::set<int> related_clusters;
  std::vector<std::string> answer_chunk_ids;   // ranked, post-trim
  std::vector<std::string> related_chunk_ids;  // ranked, post-trim
  int total_tokens = 0;
};

struct AssembledContext {
  std::string text;
  std::vector<std::string> answer_chunk_ids;
  std::vector<std::string> related_chunk_ids;
  int total_tokens = 0;
};

// Chunks the answer and maps each chunk to its nearest cluster.
std::set<int> locate_answer_clusters(const std::vector<Chunk>& answer_chunks,
                                     const std::vector<Vec>& answer_embeddings,
                                     const Mat& centroids);

// "[doc_id / ordinal]" header, chunk text, blank line between blocks.
// Headers do not count toward token totals.
std::string render_chunk_blocks(const std::vector<const Chunk*>& chunks);

// Orders and trims the selected chunks, then renders them with
// "[doc_id / ordinal]" headers. Answer-cluster chunks come first, sorted by
// descending cosine to the mean answer embedding (ties by chunk_id); related
// chunks follow grouped by ascending cluster distance to the nearest answer
// cluster, within a cluster by ascending distance to its centroid. The
// lowest-ranked chunks are dropped until the total fits the budget.
AssembledContext assemble_context(const ContextSelection& selection,
                                  const Index& index, const Vec& answer_mean,
                                  int budget);

// Full selection pipeline: chunk the answer, embed it, locate answer
// clusters, expand the neighborhood, rank and trim to the budget.
ContextSelection select_context(const std::string& qa_id,
                                const std::string& answer, const Index& index,
                                EmbeddingProvider& provider,
                                const HyperParams& params, int context_budget,
                                ExpansionMode mode = ExpansionMode::Bfs,
                                Vec* answer_mean_out = nullptr,
                                std::string* rendered_out = nullptr);

}  // namespace insightgen
