#include "insightgen/store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

#include "insightgen/config.hpp"
#include "insightgen/embedding_cache.hpp"
#include "insightgen/matrix_io.hpp"
#include "insightgen/rng.hpp"

namespace insightgen {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kChunksFile = "chunks.jsonl";
constexpr const char* kEmbeddingsFile = "embeddings.f32";
constexpr const char* kEmbeddingsMetaFile = "embeddings.meta.json";
constexpr const char* kCentroidsFile = "centroids.f32";
constexpr const char* kClustersFile = "clusters.json";
constexpr const char* kGraphFile = "graph.json";

std::string hex64_string(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (const char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

void verify_checksums(const fs::path& dir, const IndexManifest& manifest) {
  for (const auto& [file, expected] : manifest.checksums) {
    const fs::path path = dir / file;
    require(fs::exists(path), ErrorCode::Checksum, "index artifact missing: " + file);
    const std::string actual = file_checksum(path);
    require(actual == expected, ErrorCode::Checksum,
            "checksum mismatch for " + file + ": expected " + expected + ", got " + actual);
  }
}

}  // namespace

std::string file_checksum(const fs::path& path) {
  const std::string bytes = read_text_file(path);
  return hex64_string(fnv1a64(bytes));
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const fs::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(path), nullptr, false);
  require(!j.is_discarded(), ErrorCode::Parse, "invalid JSON in " + path.string());
  return j;
}

std::vector<QARecord> load_qa_jsonl(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open QA file: " + path.string());
  std::vector<QARecord> records;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    require(!j.is_discarded(), ErrorCode::Parse,
            "QA file line " + std::to_string(line_no) + " is not valid JSON");
    QARecord qa;
    qa.qa_id = j.value("qa_id", std::string());
    qa.collection_id = j.value("collection_id", std::string());
    qa.question = j.value("question", std::string());
    qa.answer = j.value("answer", std::string());
    require(valid_id(qa.qa_id), ErrorCode::Parse,
            "QA file line " + std::to_string(line_no) +
                ": qa_id must be a nonempty [A-Za-z0-9_.-] name");
    require(!qa.question.empty() && !qa.answer.empty(), ErrorCode::Parse,
            "QA record " + qa.qa_id + ": question and answer must be nonempty");
    require(seen.insert(qa.qa_id).second, ErrorCode::Parse,
            "duplicate qa_id: " + qa.qa_id);
    records.push_back(std::move(qa));
  }
  require(!records.empty(), ErrorCode::Parse, "QA file has no records: " + path.string());
  return records;
}

IndexLock::IndexLock(const fs::path& index_dir) {
  lock_path_ = index_dir / ".lock";
  std::FILE* f = std::fopen(lock_path_.string().c_str(), "wx");
  if (!f) {
    raise(ErrorCode::Locked,
          "index directory is locked by another writer: " + lock_path_.string());
  }
  std::fprintf(f, "%ld\n", static_cast<long>(::getpid()));
  std::fclose(f);
  held_ = true;
}

IndexLock::~IndexLock() {
  if (held_) {
    std::error_code ec;
    fs::remove(lock_path_, ec);
  }
}

nlohmann::json to_json(const IndexManifest& manifest) {
  nlohmann::json j;
  j["schema_version"] = manifest.schema_version;
  j["collection_id"] = manifest.collection_id;
  j["num_documents"] = manifest.num_documents;
  j["num_chunks"] = manifest.num_chunks;
  j["num_clusters"] = manifest.num_clusters;
  j["embedding_dim"] = manifest.embedding_dim;
  j["embedding_provider_id"] = manifest.embedding_provider_id;
  j["embedding_model_id"] = manifest.embedding_model_id;
  j["hyperparams"] = to_json(manifest.params);
  j["context_budget"] = manifest.context_budget;
  j["input_fingerprint"] = manifest.input_fingerprint;
  j["checksums"] = manifest.checksums;
  return j;
}

IndexManifest manifest_from_json(const nlohmann::json& j) {
  IndexManifest manifest;
  manifest.schema_version = j.at("schema_version").get<int>();
  manifest.collection_id = j.at("collection_id").get<std::string>();
  manifest.num_documents = j.at("num_documents").get<std::size_t>();
  manifest.num_chunks = j.at("num_chunks").get<std::size_t>();
  manifest.num_clusters = j.at("num_clusters").get<int>();
  manifest.embedding_dim = j.at("embedding_dim").get<int>();
  manifest.embedding_provider_id = j.at("embedding_provider_id").get<std::string>();
  manifest.embedding_model_id = j.at("embedding_model_id").get<std::string>();
  manifest.params = hyperparams_from_json(j.at("hyperparams"));
  manifest.context_budget = j.at("context_budget").get<int>();
  manifest.input_fingerprint = j.at("input_fingerprint").get<std::string>();
  manifest.checksums = j.at("checksums").get<std::map<std::string, std::string>>();
  return manifest;
}

namespace {

std::string compute_fingerprint(const std::vector<std::pair<std::string, std::string>>& files,
                                const Config& config, const std::string& provider_id,
                                const std::string& model_id) {
  std::uint64_t h = fnv1a64("index-schema-1");
  for (const auto& [name, checksum] : files) {
    h = fnv1a64(name, h);
    h = fnv1a64_byte(0x1f, h);
    h = fnv1a64(checksum, h);
    h = fnv1a64_byte(0x1e, h);
  }
  h = fnv1a64(to_json(config.params).dump(), h);
  h = fnv1a64(provider_id, h);
  h = fnv1a64_byte(0x1f, h);
  h = fnv1a64(model_id, h);
  h = fnv1a64(std::to_string(config.context_budget), h);
  return hex64_string(h);
}

}  // namespace

BuildResult build_index(const fs::path& collection_dir, const fs::path& index_dir,
                        const Config& config, EmbeddingProvider& provider) {
  config.validate();
  require(config.cluster_method == ClusterMethod::KMeans, ErrorCode::Unimplemented,
          "cluster method '" + to_string(config.cluster_method) +
              "' is not implemented; use kmeans");

  std::error_code ec;
  fs::create_directories(index_dir, ec);
  require(!ec, ErrorCode::Io, "cannot create index directory: " + index_dir.string());
  IndexLock lock(index_dir);

  const std::vector<Document> docs = load_collection(collection_dir);
  std::vector<std::pair<std::string, std::string>> file_hashes;
  for (const auto& entry : fs::directory_iterator(collection_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext != ".txt" && ext != ".md") continue;
    file_hashes.emplace_back(entry.path().filename().string(),
                             file_checksum(entry.path()));
  }
  std::sort(file_hashes.begin(), file_hashes.end());
  const std::string fingerprint = compute_fingerprint(
      file_hashes, config, provider.provider_id(), provider.model_id());

  const fs::path manifest_path = index_dir / kManifestFile;
  if (fs::exists(manifest_path)) {
    const IndexManifest existing = manifest_from_json(read_json_file(manifest_path));
    if (existing.schema_version == kIndexSchemaVersion &&
        existing.input_fingerprint == fingerprint) {
      verify_checksums(index_dir, existing);
      return BuildResult{index_dir, false, existing.num_chunks, existing.num_clusters};
    }
  }

  std::vector<Chunk> chunks;
  for (const Document& doc : docs) {
    std::vector<Chunk> doc_chunks = chunk_document(doc, config.params.chunk_budget);
    chunks.insert(chunks.end(), std::make_move_iterator(doc_chunks.begin()),
                  std::make_move_iterator(doc_chunks.end()));
  }
  require(!chunks.empty(), ErrorCode::EmptyCollection,
          "collection produced no chunks");

  EmbeddingCache cache(index_dir / "cache");
  std::vector<std::string> ids, texts;
  ids.reserve(chunks.size());
  texts.reserve(chunks.size());
  for (const Chunk& c : chunks) {
    ids.push_back(c.chunk_id);
    texts.push_back(c.text);
  }
  const std::vector<Vec> vectors =
      embed_with_cache(provider, cache, ids, texts, 64, config.parallelism);
  const Eigen::Index dim = vectors.front().size();
  Mat embeddings(static_cast<Eigen::Index>(vectors.size()), dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    embeddings.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }

  const int num_clusters = config.params.resolve_num_clusters(chunks.size());
  const ClusterModel model =
      kmeans_fit(embeddings, num_clusters, config.params.seed);
  const ThemeGraph graph = build_theme_graph(model.centroids);

  // chunks.jsonl
  {
    std::ostringstream out;
    for (const Chunk& c : chunks) {
      nlohmann::json j;
      j["chunk_id"] = c.chunk_id;
      j["doc_id"] = c.doc_id;
      j["ordinal"] = c.ordinal;
      j["text"] = c.text;
      j["token_count"] = c.token_count;
      j["span_begin"] = c.char_span.begin;
      j["span_end"] = c.char_span.end;
      out << j.dump() << '\n';
    }
    write_text_file(index_dir / kChunksFile, out.str());
  }

  write_matrix_f32(index_dir / kEmbeddingsFile, embeddings);
  {
    nlohmann::json j;
    j["rows"] = embeddings.rows();
    j["dim"] = embeddings.cols();
    j["provider_id"] = provider.provider_id();
    j["model_id"] = provider.model_id();
    j["chunk_ids"] = ids;
    write_json_file(index_dir / kEmbeddingsMetaFile, j);
  }

  write_matrix_f32(index_dir / kCentroidsFile, model.centroids);
  {
    nlohmann::json j;
    j["num_clusters"] = num_clusters;
    j["dim"] = model.centroids.cols();
    j["centroids_file"] = kCentroidsFile;
    j["inertia"] = model.inertia;
    j["iterations"] = model.iterations;
    nlohmann::json assignment = nlohmann::json::object();
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      assignment[chunks[i].chunk_id] = model.assignment[i];
    }
    j["assignment"] = std::move(assignment);
    j["hyperparams"] = to_json(config.params);
    write_json_file(index_dir / kClustersFile, j);
  }

  {
    nlohmann::json j;
    j["num_clusters"] = graph.num_clusters;
    nlohmann::json dist = nlohmann::json::array();
    for (int i = 0; i < graph.num_clusters; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < graph.num_clusters; ++k) row.push_back(graph.dist(i, k));
      dist.push_back(std::move(row));
    }
    j["dist"] = std::move(dist);
    j["neighbors"] = graph.neighbors;
    write_json_file(index_dir / kGraphFile, j);
  }

  fs::create_directories(index_dir / "traces", ec);
  fs::create_directories(index_dir / "results", ec);

  IndexManifest manifest;
  manifest.collection_id = docs.front().collection_id;
  manifest.num_documents = docs.size();
  manifest.num_chunks = chunks.size();
  manifest.num_clusters = num_clusters;
  manifest.embedding_dim = static_cast<int>(dim);
  manifest.embedding_provider_id = provider.provider_id();
  manifest.embedding_model_id = provider.model_id();
  manifest.params = config.params;
  manifest.context_budget = config.context_budget;
  manifest.input_fingerprint = fingerprint;
  for (const char* file : {kChunksFile, kEmbeddingsFile, kEmbeddingsMetaFile,
                           kCentroidsFile, kClustersFile, kGraphFile}) {
    manifest.checksums[file] = file_checksum(index_dir / file);
  }
  write_json_file(manifest_path, to_json(manifest));

  return BuildResult{index_dir, true, chunks.size(), num_clusters};
}

const Chunk& Index::chunk(const std::string& chunk_id) const {
  const auto it = row_of.find(chunk_id);
  require(it != row_of.end(), ErrorCode::Contract, "unknown chunk_id: " + chunk_id);
  return chunks[it->second];
}

int Index::cluster(const std::string& chunk_id) const {
  const auto it = cluster_of.find(chunk_id);
  require(it != cluster_of.end(), ErrorCode::Contract, "unknown chunk_id: " + chunk_id);
  return it->second;
}

Index open_index(const fs::path& index_dir) {
  Index index;
  index.dir = index_dir;
  const fs::path manifest_path = index_dir / kManifestFile;
  require(fs::exists(manifest_path), ErrorCode::Io,
          "no index manifest at " + manifest_path.string());
  index.manifest = manifest_from_json(read_json_file(manifest_path));
  require(index.manifest.schema_version == kIndexSchemaVersion, ErrorCode::Config,
          "unsupported index schema version " +
              std::to_string(index.manifest.schema_version));
  verify_checksums(index_dir, index.manifest);

  {
    std::ifstream in(index_dir / kChunksFile);
    require(in.good(), ErrorCode::Io, "cannot open chunk store");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      require(!j.is_discarded(), ErrorCode::Parse, "corrupt chunk store line");
      Chunk c;
      c.chunk_id = j.at("chunk_id").get<std::string>();
      c.doc_id = j.at("doc_id").get<std::string>();
      c.ordinal = j.at("ordinal").get<int>();
      c.text = j.at("text").get<std::string>();
      c.token_count = j.at("token_count").get<int>();
      c.char_span.begin = j.at("span_begin").get<std::size_t>();
      c.char_span.end = j.at("span_end").get<std::size_t>();
      index.row_of.emplace(c.chunk_id, index.chunks.size());
      index.chunks.push_back(std::move(c));
    }
  }
  require(index.chunks.size() == index.manifest.num_chunks, ErrorCode::Checksum,
          "chunk count differs from manifest");

  {
    const nlohmann::json meta = read_json_file(index_dir / kEmbeddingsMetaFile);
    const auto rows = meta.at("rows").get<Eigen::Index>();
    const auto dim = meta.at("dim").get<Eigen::Index>();
    require(rows == static_cast<Eigen::Index>(index.chunks.size()), ErrorCode::Checksum,
            "embedding row count differs from chunk count");
    const auto chunk_ids = meta.at("chunk_ids").get<std::vector<std::string>>();
    require(chunk_ids.size() == index.chunks.size(), ErrorCode::Checksum,
            "embedding meta lists wrong chunk count");
    for (std::size_t i = 0; i < chunk_ids.size(); ++i) {
      require(chunk_ids[i] == index.chunks[i].chunk_id, ErrorCode::Checksum,
              "embedding row order differs from chunk store");
    }
    index.embeddings = read_matrix_f32(index_dir / kEmbeddingsFile, rows, dim);
  }

  {
    const nlohmann::json j = read_json_file(index_dir / kClustersFile);
    const int m = j.at("num_clusters").get<int>();
    const auto dim = j.at("dim").get<Eigen::Index>();
    index.centroids = read_matrix_f32(
        index_dir / j.at("centroids_file").get<std::string>(), m, dim);
    index.inertia = j.at("inertia").get<double>();
    for (const auto& [chunk_id, cluster] : j.at("assignment").items()) {
      index.cluster_of[chunk_id] = cluster.get<int>();
    }
    require(index.cluster_of.size() == index.chunks.size(), ErrorCode::Checksum,
            "assignment table size differs from chunk count");
  }

  {
    const nlohmann::json j = read_json_file(index_dir / kGraphFile);
    index.graph.num_clusters = j.at("num_clusters").get<int>();
    const auto& dist = j.at("dist");
    index.graph.dist =
        Eigen::MatrixXd::Zero(index.graph.num_clusters, index.graph.num_clusters);
    for (int r = 0; r < index.graph.num_clusters; ++r) {
      for (int c = 0; c < index.graph.num_clusters; ++c) {
        index.graph.dist(r, c) = dist.at(r).at(c).get<double>();
      }
    }
    index.graph.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
  }
  return index;
}

void write_trace(const fs::path& index_dir, const ContextSelection& selection,
                 const HyperParams& params) {
  std::error_code ec;
  fs::create_directories(index_dir / "traces", ec);
  nlohmann::json j;
  j["qa_id"] = selection.qa_id;
  j["answer_clusters"] = selection.answer_clusters;
  j["related_clusters"] = selection.related_clusters;
  j["answer_chunk_ids"] = selection.answer_chunk_ids;
  j["related_chunk_ids"] = selection.related_chunk_ids;
  j["num_chunks"] = static_cast<int>(selection.answer_chunk_ids.size() +
                                     selection.related_chunk_ids.size());
  j["total_tokens"] = selection.total_tokens;
  j["k"] = params.k;
  j["max_hops"] = params.max_hops;
  j["seed"] = params.seed;
  write_json_file(index_dir / "traces" / (selection.qa_id + ".json"), j);
}

std::optional<nlohmann::json> read_trace(const fs::path& index_dir,
                                         const std::string& qa_id) {
  const fs::path path = index_dir / "traces" / (qa_id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  return read_json_file(path);
}

void write_insight_set(const fs::path& index_dir, const InsightSet& set) {
  require(valid_id(set.qa_id), ErrorCode::Contract, "bad qa_id: " + set.qa_id);
  require(valid_id(set.method_id), ErrorCode::Contract, "bad method_id: " + set.method_id);
  std::error_code ec;
  fs::create_directories(index_dir / "results" / set.qa_id, ec);
  require(!ec, ErrorCode::Io, "cannot create results directory");
  write_json_file(index_dir / "results" / set.qa_id / (set.method_id + ".json"),
                  to_json(set));
}

InsightSet read_insight_set(const fs::path& path) {
  return insight_set_from_json(read_json_file(path));
}

std::map<std::string, std::map<std::string, InsightSet>> load_results(
    const fs::path& index_dir) {
  const fs::path results_dir = index_dir / "results";
  require(fs::exists(results_dir), ErrorCode::Io,
          "no results directory under " + index_dir.string());
  std::map<std::string, std::map<std::string, InsightSet>> out;
  for (const auto& qa_entry : fs::directory_iterator(results_dir)) {
    if (!qa_entry.is_directory()) continue;
    const std::string qa_id = qa_entry.path().filename().string();
    for (const auto& file : fs::directory_iterator(qa_entry.path())) {
      if (!file.is_regular_file() || file.path().extension() != ".json") continue;
      InsightSet set = read_insight_set(file.path());
      require(set.qa_id == qa_id, ErrorCode::Parse,
              "result file qa_id mismatch under " + qa_entry.path().string());
      const std::string method_id = file.path().stem().string();
      require(set.method_id == method_id, ErrorCode::Parse,
              "result file method_id mismatch: " + file.path().string());
      out[qa_id].emplace(method_id, std::move(set));
    }
  }
  require(!out.empty(), ErrorCode::Io, "results directory is empty");
  return out;
}

}  // namespace insightgen
