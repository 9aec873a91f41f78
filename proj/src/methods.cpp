#include "insightgen/methods.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

namespace insightgen {

std::string to_string(MethodId method) {
  switch (method) {
    case MethodId::InsightGen: return "INSIGHTGEN";
    case MethodId::Direct: return "DIRECT";
    case MethodId::DirectCot: return "DIRECT_COT";
    case MethodId::Sim: return "SIM";
    case MethodId::SimCot: return "SIM_COT";
  }
  return "INSIGHTGEN";
}

MethodId method_from_string(const std::string& s) {
  for (const MethodId m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  raise(ErrorCode::Config, "unknown method id: " + s);
}

std::vector<Document> documents_from_chunks(const Index& index) {
  std::vector<Document> docs;
  for (const Chunk& chunk : index.chunks) {
    if (docs.empty() || docs.back().doc_id != chunk.doc_id) {
      Document doc;
      doc.doc_id = chunk.doc_id;
      doc.collection_id = index.manifest.collection_id;
      doc.title = chunk.doc_id;
      doc.body = chunk.text;
      docs.push_back(std::move(doc));
    } else {
      docs.back().body += ' ';
      docs.back().body += chunk.text;
    }
  }
  for (Document& doc : docs) {
    doc.token_count = approx_token_count(doc.body);
  }
  std::sort(docs.begin(), docs.end(),
            [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  return docs;
}

namespace {

// Longest prefix ending at a sentence boundary whose token count fits the
// budget. Token counts are monotone in prefix length, so binary search over
// sentence ends finds the cut.
std::string sentence_prefix(const std::string& text, int budget,
                            const TokenCounter& counter) {
  if (budget <= 0) return {};
  if (counter(text) <= budget) return text;
  const std::vector<Span> spans = split_sentences(text);
  std::size_t lo = 0;
  std::size_t hi = spans.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    const auto prefix = std::string_view(text).substr(0, spans[mid - 1].end);
    if (counter(prefix) <= budget) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  if (lo == 0) return {};
  return text.substr(0, spans[lo - 1].end);
}

}  // namespace

std::string direct_context(const std::vector<Document>& docs, int budget,
                           const TokenCounter& counter) {
  require(!docs.empty(), ErrorCode::Contract, "direct_context: no documents");
  if (budget < static_cast<int>(docs.size())) {
    raise(ErrorCode::DegenerateBudget,
          "direct context budget " + std::to_string(budget) +
              " is smaller than the document count " + std::to_string(docs.size()));
  }
  const int share = budget / static_cast<int>(docs.size());
  std::ostringstream out;
  bool first = true;
  for (const Document& doc : docs) {
    const std::string prefix = sentence_prefix(doc.body, share, counter);
    if (prefix.empty()) continue;
    if (!first) out << "\n\n";
    first = false;
    out << '[' << doc.doc_id << "]\n" << prefix;
  }
  return out.str();
}

std::string truncated_global_context(const std::vector<Document>& docs, int budget,
                                     const TokenCounter& counter) {
  require(!docs.empty(), ErrorCode::Contract, "truncated_global_context: no documents");
  require(budget >= 0, ErrorCode::Contract,
          "truncated_global_context: negative budget");
  if (budget == 0) {
    std::cerr << "warning: global context budget is 0; emitting empty context\n";
    return {};
  }
  std::ostringstream all;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i > 0) all << "\n\n";
    all << '[' << docs[i].doc_id << "]\n" << docs[i].body;
  }
  return sentence_prefix(all.str(), budget, counter);
}

std::vector<const Chunk*> similarity_retrieve(const std::string& query,
                                              int num_chunks, const Index& index,
                                              EmbeddingProvider& provider) {
  require(!query.empty(), ErrorCode::Contract, "similarity_retrieve: empty query");
  require(num_chunks >= 1, ErrorCode::Contract,
          "similarity_retrieve: num_chunks must be >= 1");
  require(!index.chunks.empty(), ErrorCode::Contract,
          "similarity_retrieve: empty index");

  const Vec q = embed_normalized(provider, {query}).front();
  require(q.size() == index.embeddings.cols(), ErrorCode::Contract,
          "similarity_retrieve: query dimension mismatch");

  std::vector<std::size_t> rows(index.chunks.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<double> score(rows.size());
  for (const std::size_t row : rows) {
    score[row] = similarity(index.embeddings.row(static_cast<Eigen::Index>(row)), q,
                            Metric::Cosine);
  }
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return index.chunks[a].chunk_id < index.chunks[b].chunk_id;
  });
  if (static_cast<std::size_t>(num_chunks) > rows.size()) {
    std::cerr << "warning: requested " << num_chunks << " chunks from an index of "
              << rows.size() << "; clamping\n";
  }
  const std::size_t take = std::min<std::size_t>(rows.size(),
                                                 static_cast<std::size_t>(num_chunks));
  std::vector<const Chunk*> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(&index.chunks[rows[i]]);
  return out;
}

namespace {

// Number of chunks the graph-based selection keeps for this question; reads
// the persisted trace when one exists, otherwise computes the selection and
// persists it so later runs agree.
int graph_selection_size(const QARecord& qa, const Index& index,
                         EmbeddingProvider& provider, const Config& config) {
  if (const auto trace = read_trace(index.dir, qa.qa_id)) {
    return trace->at("num_chunks").get<int>();
  }
  const ContextSelection sel =
      select_context(qa.qa_id, qa.answer, index, provider, index.manifest.params,
                     config.context_budget, config.expansion_mode);
  write_trace(index.dir, sel, index.manifest.params);
  return static_cast<int>(sel.answer_chunk_ids.size() + sel.related_chunk_ids.size());
}

}  // namespace

MethodRun run_method(MethodId method, const QARecord& qa, const Index& index,
                     EmbeddingProvider& provider, TextModel& model,
                     const Config& config) {
  require(!qa.question.empty() && !qa.answer.empty(), ErrorCode::Contract,
          "run_method: question and answer must be nonempty");

  const std::string method_id = to_string(method);
  const int max_insights = index.manifest.params.max_insights;

  MethodRun run;
  std::string context;
  bool two_step = false;

  switch (method) {
    case MethodId::InsightGen: {
      Vec answer_mean;
      std::string rendered;
      ContextSelection sel =
          select_context(qa.qa_id, qa.answer, index, provider, index.manifest.params,
                         config.context_budget, config.expansion_mode, &answer_mean,
                         &rendered);
      write_trace(index.dir, sel, index.manifest.params);
      run.num_context_chunks =
          static_cast<int>(sel.answer_chunk_ids.size() + sel.related_chunk_ids.size());
      run.selection = std::move(sel);
      context = std::move(rendered);
      two_step = true;
      break;
    }
    case MethodId::Direct:
    case MethodId::DirectCot: {
      const std::vector<Document> docs = documents_from_chunks(index);
      context = (method == MethodId::Direct)
                    ? direct_context(docs, config.context_budget)
                    : truncated_global_context(docs, config.context_budget);
      run.num_context_chunks = static_cast<int>(docs.size());
      two_step = (method == MethodId::DirectCot);
      break;
    }
    case MethodId::Sim:
    case MethodId::SimCot: {
      const int n = graph_selection_size(qa, index, provider, config);
      std::string query = qa.question;
      if (config.sim_query_includes_answer) {
        query += '\n';
        query += qa.answer;
      }
      const std::vector<const Chunk*> chunks =
          similarity_retrieve(query, n, index, provider);
      context = render_chunk_blocks(chunks);
      run.num_context_chunks = static_cast<int>(chunks.size());
      two_step = (method == MethodId::SimCot);
      break;
    }
  }

  if (two_step) {
    const IntentProfile intent =
        infer_intent(qa.question, qa.answer, model, config.max_retries);
    run.set = generate_insights(qa.qa_id, method_id, qa.question, qa.answer, context,
                                &intent, model, max_insights, config.max_retries);
  } else {
    run.set = generate_insights(qa.qa_id, method_id, qa.question, qa.answer, context,
                                nullptr, model, max_insights, config.max_retries);
  }
  return run;
}

}  // namespace insightgen
