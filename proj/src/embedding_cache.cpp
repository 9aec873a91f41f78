#include "insightgen/embedding_cache.hpp"

#include <atomic>
#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "insightgen/matrix_io.hpp"

namespace insightgen {

namespace {

// same convention as the matrix files: little-endian f32
void append_floats_le(std::ofstream& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    float f = v[i];
    std::uint32_t w;
    static_assert(sizeof(float) == sizeof(std::uint32_t));
    std::memcpy(&w, &f, sizeof(w));
    if constexpr (std::endian::native != std::endian::little) {
      w = ((w & 0x000000ffu) << 24) | ((w & 0x0000ff00u) << 8) |
          ((w & 0x00ff0000u) >> 8) | ((w & 0xff000000u) >> 24);
    }
    out.write(reinterpret_cast<const char*>(&w), sizeof(w));
  }
}

}  // namespace

std::string EmbeddingCache::key_of(const std::string& chunk_id,
                                   const std::string& provider_id,
                                   const std::string& model_id) {
  std::string key;
  key.reserve(chunk_id.size() + provider_id.size() + model_id.size() + 2);
  key += chunk_id;
  key += '\x1f';
  key += provider_id;
  key += '\x1f';
  key += model_id;
  return key;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  require(!ec, ErrorCode::Io, "cannot create cache directory: " + dir_.string());
  meta_path_ = dir_ / "cache.meta.jsonl";
  data_path_ = dir_ / "cache.f32";
  load();
}

void EmbeddingCache::load() {
  namespace fs = std::filesystem;
  if (!fs::exists(meta_path_)) return;
  std::ifstream meta(meta_path_);
  require(meta.good(), ErrorCode::Cache, "cannot open cache meta: " + meta_path_.string());
  std::ifstream data(data_path_, std::ios::binary);
  require(data.good(), ErrorCode::Cache, "cache data file missing: " + data_path_.string());

  std::string line;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    require(!j.is_discarded(), ErrorCode::Cache, "corrupt cache meta line");
    const int dim = j.at("dim").get<int>();
    require(dim > 0, ErrorCode::Cache, "corrupt cache meta: bad dim");
    std::vector<std::uint32_t> words(static_cast<std::size_t>(dim));
    data.read(reinterpret_cast<char*>(words.data()),
              static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
    require(static_cast<std::size_t>(data.gcount()) == words.size() * sizeof(std::uint32_t),
            ErrorCode::Cache, "cache data shorter than meta");
    if constexpr (std::endian::native != std::endian::little) {
      for (auto& w : words) {
        w = ((w & 0x000000ffu) << 24) | ((w & 0x0000ff00u) << 8) |
            ((w & 0x00ff0000u) >> 8) | ((w & 0xff000000u) >> 24);
      }
    }
    Vec v(dim);
    std::memcpy(v.data(), words.data(), words.size() * sizeof(float));
    const std::string key = key_of(j.at("chunk_id").get<std::string>(),
                                   j.at("provider_id").get<std::string>(),
                                   j.at("model_id").get<std::string>());
    auto [it, inserted] = rows_.try_emplace(key, vectors_.size());
    if (inserted) {
      vectors_.push_back(std::move(v));
    } else {
      vectors_[it->second] = std::move(v);
    }
  }
}

std::optional<Vec> EmbeddingCache::get(const std::string& chunk_id,
                                       const std::string& provider_id,
                                       const std::string& model_id) const {
  std::shared_lock lock(mutex_);
  const auto it = rows_.find(key_of(chunk_id, provider_id, model_id));
  if (it == rows_.end()) return std::nullopt;
  return vectors_[it->second];
}

void EmbeddingCache::put(const EmbeddingRecord& record) {
  require(record.vector.size() > 0, ErrorCode::Contract, "cache put: empty vector");
  std::unique_lock lock(mutex_);
  std::ofstream data(data_path_, std::ios::binary | std::ios::app);
  require(data.good(), ErrorCode::Cache, "cannot append cache data");
  append_floats_le(data, record.vector);
  data.flush();
  require(data.good(), ErrorCode::Cache, "cache data write failed");

  nlohmann::json j;
  j["chunk_id"] = record.chunk_id;
  j["provider_id"] = record.provider_id;
  j["model_id"] = record.model_id;
  j["dim"] = static_cast<int>(record.vector.size());
  std::ofstream meta(meta_path_, std::ios::app);
  require(meta.good(), ErrorCode::Cache, "cannot append cache meta");
  meta << j.dump() << '\n';
  meta.flush();
  require(meta.good(), ErrorCode::Cache, "cache meta write failed");

  const std::string key = key_of(record.chunk_id, record.provider_id, record.model_id);
  auto [it, inserted] = rows_.try_emplace(key, vectors_.size());
  if (inserted) {
    vectors_.push_back(record.vector);
  } else {
    vectors_[it->second] = record.vector;
  }
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return rows_.size();
}

std::vector<Vec> embed_with_cache(EmbeddingProvider& provider,
                                  EmbeddingCache& cache,
                                  const std::vector<std::string>& ids,
                                  const std::vector<std::string>& texts,
                                  int batch_size, int parallelism) {
  require(ids.size() == texts.size(), ErrorCode::Contract,
          "embed_with_cache: ids/texts length mismatch");
  require(!ids.empty(), ErrorCode::Contract, "embed_with_cache: empty input");
  require(batch_size >= 1, ErrorCode::Contract, "embed_with_cache: bad batch size");

  const std::string provider_id = provider.provider_id();
  const std::string model_id = provider.model_id();

  std::vector<Vec> out(ids.size());
  std::vector<std::size_t> misses;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (auto hit = cache.get(ids[i], provider_id, model_id)) {
      out[i] = std::move(*hit);
    } else {
      misses.push_back(i);
    }
  }
  if (misses.empty()) return out;

  std::vector<std::pair<std::size_t, std::size_t>> batches;
  for (std::size_t b = 0; b < misses.size(); b += static_cast<std::size_t>(batch_size)) {
    batches.emplace_back(b, std::min(misses.size(), b + static_cast<std::size_t>(batch_size)));
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t bi = next.fetch_add(1);
      if (bi >= batches.size()) return;
      try {
        const auto [lo, hi] = batches[bi];
        std::vector<std::string> batch_texts;
        batch_texts.reserve(hi - lo);
        for (std::size_t m = lo; m < hi; ++m) batch_texts.push_back(texts[misses[m]]);
        std::vector<Vec> vecs = embed_normalized(provider, batch_texts);
        for (std::size_t m = lo; m < hi; ++m) out[misses[m]] = std::move(vecs[m - lo]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(batches.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // single writer keeps the on-disk order deterministic
  for (const std::size_t i : misses) {
    cache.put(EmbeddingRecord{ids[i], provider_id, model_id, out[i]});
  }
  return out;
}

}  // namespace insightgen
