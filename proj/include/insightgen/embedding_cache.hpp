#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "insightgen/embedding.hpp"

namespace insightgen {

struct EmbeddingRecord {
  std::string chunk_id;
  std::string provider_id;
  std::string model_id;
  Vec vector;
};

// Append-only on-disk cache keyed by (chunk_id, provider_id, model_id).
// Vectors round-trip bit-identically. Safe for concurrent put/get from
// multiple threads of one process; the last put for a key wins.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path dir);

  std::optional<Vec> get(const std::string& chunk_id,
                         const std::string& provider_id,
                         const std::string& model_id) const;
  void put(const EmbeddingRecord& record);
  std::size_t size() const;

 private:
  static std::string key_of(const std::string& chunk_id,
                            const std::string& provider_id,
                            const std::string& model_id);
  void load();

  std::filesystem::path dir_;
  std::filesystem::path meta_path_;
  std::filesystem::path data_path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::size_t> rows_;
  std::vector<Vec> vectors_;
};

// Cache-through embedding: hits are served from the cache, misses go to the
// provider in batches and are written back. Output order matches input order
// and is identical whether or not the cache was warm.
std::vector<Vec> embed_with_cache(EmbeddingProvider& provider,
                                  EmbeddingCache& cache,
                                  const std::vector<std::string>& ids,
                                  const std::vector<std::string>& texts,
                                  int batch_size = 64, int parallelism = 1);

}  // namespace insightgen
