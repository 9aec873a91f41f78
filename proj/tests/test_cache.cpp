#include <doctest.h>

#include <string>
#include <vector>

#include "insightgen/embedding.hpp"
#include "insightgen/embedding_cache.hpp"
#include "insightgen/errors.hpp"
#include "insightgen/rng.hpp"
#include "test_support.hpp"

using namespace insightgen;
using testutil::TempDir;

namespace {

Vec vec_of(std::initializer_list<float> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const float x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("cache misses return nothing, hits return the stored vector bitwise") {
  TempDir dir;
  EmbeddingCache cache(dir.path());
  CHECK(cache.size() == 0);
  CHECK(!cache.get("c1", "mock", "m1").has_value());

  const Vec v = vec_of({0.25f, -1.5f, 3.0f});
  cache.put({"c1", "mock", "m1", v});
  CHECK(cache.size() == 1);
  const auto hit = cache.get("c1", "mock", "m1");
  REQUIRE(hit.has_value());
  CHECK(*hit == v);

  // key is the full triple
  CHECK(!cache.get("c1", "mock", "m2").has_value());
  CHECK(!cache.get("c1", "http", "m1").has_value());
  CHECK(!cache.get("c2", "mock", "m1").has_value());
}

TEST_CASE("last put wins and survives reload from disk") {
  TempDir dir;
  const Vec first = vec_of({1.0f, 2.0f});
  const Vec second = vec_of({-7.0f, 0.5f});
  {
    EmbeddingCache cache(dir.path());
    cache.put({"c1", "mock", "m1", first});
    cache.put({"c1", "mock", "m1", second});
    const auto hit = cache.get("c1", "mock", "m1");
    REQUIRE(hit.has_value());
    CHECK(*hit == second);
  }
  EmbeddingCache reloaded(dir.path());
  const auto hit = reloaded.get("c1", "mock", "m1");
  REQUIRE(hit.has_value());
  CHECK(*hit == second);
}

TEST_CASE("a large put/get cycle round-trips every vector") {
  TempDir dir;
  const int n = 2000;
  {
    EmbeddingCache cache(dir.path());
    for (int i = 0; i < n; ++i) {
      const std::string id = "chunk-" + std::to_string(i);
      cache.put({id, "mock", "m1", MockEmbeddingProvider::embed_one("m1", id, 16)});
    }
    CHECK(cache.size() == static_cast<std::size_t>(n));
  }
  EmbeddingCache cache(dir.path());
  CHECK(cache.size() == static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::string id = "chunk-" + std::to_string(i);
    const auto hit = cache.get(id, "mock", "m1");
    REQUIRE(hit.has_value());
    CHECK(*hit == MockEmbeddingProvider::embed_one("m1", id, 16));
  }
}

TEST_CASE("embed_with_cache returns identical vectors cold and warm") {
  TempDir dir;
  MockEmbeddingProvider provider(32, "mock-embed");
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (int i = 0; i < 150; ++i) {
    ids.push_back("id-" + std::to_string(i));
    texts.push_back("text body " + std::to_string(i));
  }

  EmbeddingCache cache(dir.path());
  const std::vector<Vec> cold = embed_with_cache(provider, cache, ids, texts, 64, 1);
  REQUIRE(cold.size() == ids.size());
  CHECK(cache.size() == ids.size());

  const std::vector<Vec> warm = embed_with_cache(provider, cache, ids, texts, 64, 1);
  REQUIRE(warm.size() == cold.size());
  for (std::size_t i = 0; i < cold.size(); ++i) {
    CHECK(cold[i] == warm[i]);
    // order is the input order, values are the provider's
    CHECK(cold[i] == MockEmbeddingProvider::embed_one("mock-embed", texts[i], 32));
  }
}

TEST_CASE("embed_with_cache is order-stable across batch size and parallelism") {
  MockEmbeddingProvider provider(16, "mock-embed");
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (int i = 0; i < 97; ++i) {
    ids.push_back("id-" + std::to_string(i));
    texts.push_back("payload " + std::to_string(i * 11));
  }

  TempDir d1;
  TempDir d2;
  TempDir d3;
  EmbeddingCache c1(d1.path());
  EmbeddingCache c2(d2.path());
  EmbeddingCache c3(d3.path());
  const auto serial = embed_with_cache(provider, c1, ids, texts, 10, 1);
  const auto parallel = embed_with_cache(provider, c2, ids, texts, 10, 4);
  const auto big_batch = embed_with_cache(provider, c3, ids, texts, 1000, 3);
  REQUIRE(serial.size() == ids.size());
  REQUIRE(parallel.size() == ids.size());
  REQUIRE(big_batch.size() == ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    CHECK(serial[i] == parallel[i]);
    CHECK(serial[i] == big_batch[i]);
  }
}

TEST_CASE("embed_with_cache rejects mismatched ids and texts") {
  TempDir dir;
  MockEmbeddingProvider provider(8, "mock-embed");
  EmbeddingCache cache(dir.path());
  const std::vector<std::string> ids = {"a"};
  const std::vector<std::string> texts = {"x", "y"};
  CHECK_THROWS_AS(embed_with_cache(provider, cache, ids, texts), Error);
  CHECK_THROWS_AS(embed_with_cache(provider, cache, {}, {}), Error);
}
