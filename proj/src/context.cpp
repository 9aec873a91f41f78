#include "insightgen/context.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "insightgen/store.hpp"

namespace insightgen {

std::set<int> locate_answer_clusters(const std::vector<Chunk>& answer_chunks,
                                     const std::vector<Vec>& answer_embeddings,
                                     const Mat& centroids) {
  require(!answer_chunks.empty(), ErrorCode::Contract,
          "locate_answer_clusters: no answer chunks");
  require(answer_chunks.size() == answer_embeddings.size(), ErrorCode::Contract,
          "locate_answer_clusters: chunk/embedding count mismatch");
  std::set<int> clusters;
  for (const Vec& v : answer_embeddings) {
    clusters.insert(assign_nearest(v, centroids));
  }
  return clusters;
}

std::string render_chunk_blocks(const std::vector<const Chunk*>& chunks) {
  std::ostringstream out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (i > 0) out << "\n\n";
    out << '[' << chunks[i]->doc_id << " / " << chunks[i]->ordinal << "]\n"
        << chunks[i]->text;
  }
  return out.str();
}

namespace {

double chunk_centroid_distance(const Index& index, std::size_t row, int cluster) {
  return (index.embeddings.row(static_cast<Eigen::Index>(row)).cast<double>() -
          index.centroids.row(cluster).cast<double>())
      .norm();
}

}  // namespace

AssembledContext assemble_context(const ContextSelection& selection,
                                  const Index& index, const Vec& answer_mean,
                                  int budget) {
  require(budget >= 1, ErrorCode::Contract, "assemble_context: budget must be >= 1");
  require(!selection.answer_clusters.empty(), ErrorCode::Contract,
          "assemble_context: no answer clusters");
  require(answer_mean.size() == index.embeddings.cols(), ErrorCode::Contract,
          "assemble_context: answer embedding dimension mismatch");

  // rows per cluster, in chunk order
  std::vector<std::size_t> answer_rows;
  std::map<int, std::vector<std::size_t>> related_rows;
  for (std::size_t row = 0; row < index.chunks.size(); ++row) {
    const int c = index.cluster(index.chunks[row].chunk_id);
    if (selection.answer_clusters.count(c)) {
      answer_rows.push_back(row);
    } else if (selection.related_clusters.count(c)) {
      related_rows[c].push_back(row);
    }
  }
  require(!answer_rows.empty(), ErrorCode::Contract,
          "assemble_context: answer clusters hold no chunks");

  int smallest_answer_chunk = std::numeric_limits<int>::max();
  for (const std::size_t row : answer_rows) {
    smallest_answer_chunk = std::min(smallest_answer_chunk, index.chunks[row].token_count);
  }
  require(smallest_answer_chunk <= budget, ErrorCode::DegenerateBudget,
          "context budget is smaller than the smallest answer-cluster chunk");

  std::sort(answer_rows.begin(), answer_rows.end(), [&](std::size_t a, std::size_t b) {
    const double sa = similarity(index.embeddings.row(static_cast<Eigen::Index>(a)),
                                 answer_mean, Metric::Cosine);
    const double sb = similarity(index.embeddings.row(static_cast<Eigen::Index>(b)),
                                 answer_mean, Metric::Cosine);
    if (sa != sb) return sa > sb;
    return index.chunks[a].chunk_id < index.chunks[b].chunk_id;
  });

  // related clusters by ascending distance to the nearest answer cluster
  std::vector<int> related_order(selection.related_clusters.begin(),
                                 selection.related_clusters.end());
  auto cluster_key = [&](int c) {
    double best = std::numeric_limits<double>::infinity();
    for (const int a : selection.answer_clusters) {
      best = std::min(best, index.graph.dist(c, a));
    }
    return best;
  };
  std::sort(related_order.begin(), related_order.end(), [&](int a, int b) {
    const double da = cluster_key(a);
    const double db = cluster_key(b);
    if (da != db) return da < db;
    return a < b;
  });

  struct Entry {
    std::size_t row;
    bool from_answer;
  };
  std::vector<Entry> ranked;
  ranked.reserve(index.chunks.size());
  for (const std::size_t row : answer_rows) ranked.push_back({row, true});
  for (const int c : related_order) {
    auto it = related_rows.find(c);
    if (it == related_rows.end()) continue;
    std::vector<std::size_t>& rows = it->second;
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      const double da = chunk_centroid_distance(index, a, c);
      const double db = chunk_centroid_distance(index, b, c);
      if (da != db) return da < db;
      return index.chunks[a].chunk_id < index.chunks[b].chunk_id;
    });
    for (const std::size_t row : rows) ranked.push_back({row, false});
  }

  long long total = 0;
  for (const Entry& e : ranked) total += index.chunks[e.row].token_count;
  while (!ranked.empty() && total > budget) {
    total -= index.chunks[ranked.back().row].token_count;
    ranked.pop_back();
  }
  require(!ranked.empty(), ErrorCode::DegenerateBudget,
          "context budget admits no chunks");

  AssembledContext out;
  std::vector<const Chunk*> blocks;
  blocks.reserve(ranked.size());
  for (const Entry& e : ranked) {
    const Chunk& chunk = index.chunks[e.row];
    blocks.push_back(&chunk);
    if (e.from_answer) {
      out.answer_chunk_ids.push_back(chunk.chunk_id);
    } else {
      out.related_chunk_ids.push_back(chunk.chunk_id);
    }
  }
  out.text = render_chunk_blocks(blocks);
  out.total_tokens = static_cast<int>(total);
  return out;
}

ContextSelection select_context(const std::string& qa_id,
                                const std::string& answer, const Index& index,
                                EmbeddingProvider& provider,
                                const HyperParams& params, int context_budget,
                                ExpansionMode mode, Vec* answer_mean_out,
                                std::string* rendered_out) {
  require(!answer.empty(), ErrorCode::Contract, "select_context: empty answer");
  require(mode == ExpansionMode::Bfs, ErrorCode::Unimplemented,
          "global_topk expansion is not implemented; use bfs");

  const std::vector<Chunk> answer_chunks =
      chunk_text(answer, params.chunk_budget, default_token_counter(), "answer");
  require(!answer_chunks.empty(), ErrorCode::Contract,
          "select_context: answer has no sentences");

  std::vector<std::string> texts;
  texts.reserve(answer_chunks.size());
  for (const Chunk& c : answer_chunks) texts.push_back(c.text);
  const std::vector<Vec> embeddings = embed_normalized(provider, texts);

  ContextSelection sel;
  sel.qa_id = qa_id;
  sel.answer_clusters = locate_answer_clusters(answer_chunks, embeddings, index.centroids);
  sel.related_clusters =
      expand_neighborhood(index.graph, sel.answer_clusters, params.k, params.max_hops);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(index.embeddings.cols());
  for (const Vec& v : embeddings) mean += v.cast<double>();
  mean /= static_cast<double>(embeddings.size());
  const Vec answer_mean = mean.cast<float>();

  const AssembledContext assembled =
      assemble_context(sel, index, answer_mean, context_budget);
  sel.answer_chunk_ids = assembled.answer_chunk_ids;
  sel.related_chunk_ids = assembled.related_chunk_ids;
  sel.total_tokens = assembled.total_tokens;

  if (answer_mean_out) *answer_mean_out = answer_mean;
  if (rendered_out) *rendered_out = assembled.text;
  return sel;
}

}  // namespace insightgen
