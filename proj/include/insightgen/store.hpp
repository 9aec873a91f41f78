#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "insightgen/context.hpp"
#include "insightgen/corpus.hpp"
#include "insightgen/embedding.hpp"
#include "insightgen/hyperparams.hpp"
#include "insightgen/insight.hpp"
#include "insightgen/kmeans.hpp"
#include "insightgen/theme_graph.hpp"

namespace insightgen {

struct Config;

struct QARecord {
  std::string qa_id;
  std::string collection_id;
  std::string question;
  std::string answer;
};

std::vector<QARecord> load_qa_jsonl(const std::filesystem::path& path);

inline constexpr int kIndexSchemaVersion = 1;

struct IndexManifest {
  int schema_version = kIndexSchemaVersion;
  std::string collection_id;
  std::size_t num_documents = 0;
  std::size_t num_chunks = 0;
  int num_clusters = 0;
  int embedding_dim = 0;
  std::string embedding_provider_id;
  std::string embedding_model_id;
  HyperParams params;
  int context_budget = 0;
  std::string input_fingerprint;
  std::map<std::string, std::string> checksums;  // artifact file -> fnv1a64 hex
};

// FNV-1a 64 over the file bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

// Exclusive-create lock file guarding an index directory against concurrent
// writers; released (unlinked) on destruction.
class IndexLock {
 public:
  explicit IndexLock(const std::filesystem::path& index_dir);
  ~IndexLock();
  IndexLock(const IndexLock&) = delete;
  IndexLock& operator=(const IndexLock&) = delete;

 private:
  std::filesystem::path lock_path_;
  bool held_ = false;
};

struct Index {
  std::filesystem::path dir;
  IndexManifest manifest;
  std::vector<Chunk> chunks;
  std::unordered_map<std::string, std::size_t> row_of;  // chunk_id -> row
  Mat embeddings;  // unit rows, row order matches chunks
  Mat centroids;
  std::unordered_map<std::string, int> cluster_of;  // chunk_id -> cluster
  double inertia = 0.0;
  ThemeGraph graph;

  const Chunk& chunk(const std::string& chunk_id) const;
  int cluster(const std::string& chunk_id) const;
  int num_clusters() const { return graph.num_clusters; }
};

struct BuildResult {
  std::filesystem::path dir;
  bool rebuilt = false;  // false when the fingerprint matched and nothing was written
  std::size_t num_chunks = 0;
  int num_clusters = 0;
};

BuildResult build_index(const std::filesystem::path& collection_dir,
                        const std::filesystem::path& index_dir,
                        const Config& config, EmbeddingProvider& provider);

// Loads and checksum-verifies every artifact.
Index open_index(const std::filesystem::path& index_dir);

void write_trace(const std::filesystem::path& index_dir,
                 const ContextSelection& selection, const HyperParams& params);
std::optional<nlohmann::json> read_trace(const std::filesystem::path& index_dir,
                                         const std::string& qa_id);

void write_insight_set(const std::filesystem::path& index_dir, const InsightSet& set);
InsightSet read_insight_set(const std::filesystem::path& path);

// results/<qa_id>/<method_id>.json, grouped as qa_id -> method_id -> set.
std::map<std::string, std::map<std::string, InsightSet>> load_results(
    const std::filesystem::path& index_dir);

nlohmann::json to_json(const IndexManifest& manifest);
IndexManifest manifest_from_json(const nlohmann::json& j);

// Canonical JSON serialization used for every artifact (sorted keys,
// 2-space indent, trailing newline) so reruns are byte-identical.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace insightgen
