#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "insightgen/config.hpp"
#include "insightgen/context.hpp"
#include "insightgen/corpus.hpp"
#include "insightgen/embedding.hpp"
#include "insightgen/errors.hpp"
#include "insightgen/hyperparams.hpp"
#include "insightgen/insight.hpp"
#include "insightgen/kmeans.hpp"
#include "insightgen/store.hpp"
#include "test_support.hpp"

namespace {

using namespace insightgen;
namespace fs = std::filesystem;

struct BuiltStore {
  testutil::TempDir dir;
  Config config;
  fs::path collection;
  fs::path index_dir;
  BuildResult first_build;

  BuiltStore() : config(testutil::mock_config(40)) {
    collection = dir.path() / "collection";
    index_dir = dir.path() / "index";
    testutil::write_fixture_collection(collection);
    auto provider = make_embedding_provider(config);
    first_build = build_index(collection, index_dir, config, *provider);
  }
};

InsightSet small_set(const std::string& qa_id, const std::string& method_id) {
  InsightSet set;
  set.qa_id = qa_id;
  set.method_id = method_id;
  set.template_version = "v1";
  Insight ins;
  ins.type = InsightType::PotentialIssue;
  ins.hook = "Hook for " + method_id;
  ins.body = "Body for " + qa_id + " via " + method_id + ".";
  ins.takeaway = "Takeaway.";
  ins.justification = "Stored fixture.";
  ins.self_scores = {4.0, 3.0, 2.0, 1.0};
  set.insights.push_back(std::move(ins));
  return set;
}

TEST_CASE("file checksums match published 64-bit fnv-1a vectors") {
  testutil::TempDir dir;
  write_text_file(dir.path() / "abc.bin", "abc");
  CHECK(file_checksum(dir.path() / "abc.bin") == "e71fa2190541574b");
  write_text_file(dir.path() / "empty.bin", "");
  CHECK(file_checksum(dir.path() / "empty.bin") == "cbf29ce484222325");
  write_text_file(dir.path() / "hw.bin", "hello world");
  CHECK(file_checksum(dir.path() / "hw.bin") == "779a65e7023cd2e7");
}

TEST_CASE("json artifacts are written sorted, indented and newline-terminated") {
  testutil::TempDir dir;
  nlohmann::json j;
  j["b"] = 1;
  j["a"]["z"] = true;
  j["a"]["m"] = {1, 2};
  const fs::path path = dir.path() / "x.json";
  write_json_file(path, j);
  const std::string expected =
      "{\n"
      "  \"a\": {\n"
      "    \"m\": [\n"
      "      1,\n"
      "      2\n"
      "    ],\n"
      "    \"z\": true\n"
      "  },\n"
      "  \"b\": 1\n"
      "}\n";
  CHECK(read_text_file(path) == expected);
  CHECK(read_json_file(path) == j);

  write_text_file(dir.path() / "bad.json", "{nope");
  CHECK(testutil::thrown_code([&] {
          read_json_file(dir.path() / "bad.json");
        }) == ErrorCode::Parse);
  CHECK(testutil::thrown_code([&] {
          read_json_file(dir.path() / "absent.json");
        }) == ErrorCode::Io);
}

TEST_CASE("a fresh build writes a self-consistent manifest") {
  BuiltStore s;
  CHECK(s.first_build.rebuilt);
  CHECK(s.first_build.dir == s.index_dir);

  const nlohmann::json mj = read_json_file(s.index_dir / "manifest.json");
  const IndexManifest manifest = manifest_from_json(mj);
  CHECK(manifest.schema_version == kIndexSchemaVersion);
  CHECK(manifest.collection_id == "collection");
  CHECK(manifest.num_documents == 10);
  CHECK(manifest.num_chunks == s.first_build.num_chunks);
  CHECK(manifest.num_clusters == s.first_build.num_clusters);
  CHECK(manifest.embedding_dim == s.config.mock_embedding_dim);
  CHECK(manifest.context_budget == s.config.context_budget);
  CHECK(manifest.params == s.config.params);
  CHECK(manifest.embedding_provider_id == "mock");
  CHECK(manifest.input_fingerprint.size() == 16);

  std::ifstream in(s.index_dir / "chunks.jsonl");
  std::size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++lines;
  }
  CHECK(lines == manifest.num_chunks);
  CHECK(manifest.num_clusters == default_num_clusters(manifest.num_chunks));

  REQUIRE(manifest.checksums.size() == 6);
  for (const char* file : {"chunks.jsonl", "embeddings.f32", "embeddings.meta.json",
                           "centroids.f32", "clusters.json", "graph.json"}) {
    REQUIRE(manifest.checksums.count(file) == 1);
    CHECK(file_checksum(s.index_dir / file) == manifest.checksums.at(file));
  }
  CHECK(to_json(manifest) == mj);
  CHECK(fs::is_directory(s.index_dir / "traces"));
  CHECK(fs::is_directory(s.index_dir / "results"));
  CHECK_FALSE(fs::exists(s.index_dir / ".lock"));
}

TEST_CASE("opening an index restores chunks, embeddings, clusters and graph") {
  BuiltStore s;
  const Index index = open_index(s.index_dir);
  CHECK(index.dir == s.index_dir);
  CHECK(index.chunks.size() == index.manifest.num_chunks);
  CHECK(index.row_of.size() == index.chunks.size());
  CHECK(index.embeddings.rows() == static_cast<Eigen::Index>(index.chunks.size()));
  CHECK(index.embeddings.cols() == index.manifest.embedding_dim);
  CHECK(index.centroids.rows() == index.manifest.num_clusters);
  CHECK(index.centroids.cols() == index.manifest.embedding_dim);
  CHECK(index.cluster_of.size() == index.chunks.size());
  CHECK(index.num_clusters() == index.manifest.num_clusters);
  CHECK(index.graph.dist.rows() == index.manifest.num_clusters);
  CHECK(index.graph.dist.cols() == index.manifest.num_clusters);

  std::vector<int> used(static_cast<std::size_t>(index.manifest.num_clusters), 0);
  for (std::size_t i = 0; i < index.chunks.size(); ++i) {
    const Chunk& c = index.chunks[i];
    CHECK(index.row_of.at(c.chunk_id) == i);
    CHECK(&index.chunk(c.chunk_id) == &index.chunks[i]);

    // every stored row is the provider's vector for the chunk text
    const Vec row = index.embeddings.row(static_cast<Eigen::Index>(i));
    const Vec expected = MockEmbeddingProvider::embed_one(
        index.manifest.embedding_model_id, c.text, index.manifest.embedding_dim);
    CHECK(row == expected);

    // the saved assignment is the nearest stored centroid
    const int cluster = index.cluster(c.chunk_id);
    CHECK(cluster == assign_nearest(row, index.centroids));
    used[static_cast<std::size_t>(cluster)] += 1;
  }
  CHECK(std::count(used.begin(), used.end(), 0) == 0);

  CHECK(testutil::thrown_code([&] {
          index.chunk("no-such-chunk");
        }) == ErrorCode::Contract);
  CHECK(testutil::thrown_code([&] {
          index.cluster("no-such-chunk");
        }) == ErrorCode::Contract);
}

TEST_CASE("rebuilds are skipped while the fingerprint matches") {
  BuiltStore s;
  const auto manifest_time = fs::last_write_time(s.index_dir / "manifest.json");
  const auto embed_time = fs::last_write_time(s.index_dir / "embeddings.f32");
  const std::string manifest_bytes = read_text_file(s.index_dir / "manifest.json");
  auto provider = make_embedding_provider(s.config);

  const BuildResult second = build_index(s.collection, s.index_dir, s.config, *provider);
  CHECK_FALSE(second.rebuilt);
  CHECK(second.num_chunks == s.first_build.num_chunks);
  CHECK(second.num_clusters == s.first_build.num_clusters);
  CHECK(fs::last_write_time(s.index_dir / "manifest.json") == manifest_time);
  CHECK(fs::last_write_time(s.index_dir / "embeddings.f32") == embed_time);
  CHECK(read_text_file(s.index_dir / "manifest.json") == manifest_bytes);

  SUBCASE("editing a document triggers a rebuild") {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(s.collection)) {
      if (entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    REQUIRE(!files.empty());
    write_text_file(files.front(),
                    read_text_file(files.front()) + " A fresh closing sentence.");
    const BuildResult third = build_index(s.collection, s.index_dir, s.config, *provider);
    CHECK(third.rebuilt);
    const IndexManifest updated =
        manifest_from_json(read_json_file(s.index_dir / "manifest.json"));
    const IndexManifest original =
        manifest_from_json(nlohmann::json::parse(manifest_bytes));
    CHECK(updated.input_fingerprint != original.input_fingerprint);
  }

  SUBCASE("changing the context budget triggers a rebuild") {
    Config changed = s.config;
    changed.context_budget += 1;
    const BuildResult third = build_index(s.collection, s.index_dir, changed, *provider);
    CHECK(third.rebuilt);
  }

  SUBCASE("changing the chunk budget triggers a rebuild") {
    Config changed = s.config;
    changed.params.chunk_budget = 30;
    const BuildResult third = build_index(s.collection, s.index_dir, changed, *provider);
    CHECK(third.rebuilt);
  }
}

TEST_CASE("checksum verification fails closed on tampered artifacts") {
  BuiltStore s;

  SUBCASE("a flipped byte in the embedding matrix is caught") {
    const fs::path target = s.index_dir / "embeddings.f32";
    std::string bytes = read_text_file(target);
    REQUIRE(bytes.size() > 8);
    bytes[7] = static_cast<char>(bytes[7] ^ 0x01);
    write_text_file(target, bytes);
    CHECK(testutil::thrown_code([&] { open_index(s.index_dir); }) == ErrorCode::Checksum);

    // a matching fingerprint never licenses reuse of corrupt artifacts
    auto provider = make_embedding_provider(s.config);
    CHECK(testutil::thrown_code([&] {
            build_index(s.collection, s.index_dir, s.config, *provider);
          }) == ErrorCode::Checksum);
  }

  SUBCASE("an edited chunk store is caught") {
    const fs::path target = s.index_dir / "chunks.jsonl";
    std::string bytes = read_text_file(target);
    const auto pos = bytes.find("Telescopes");
    REQUIRE(pos != std::string::npos);
    bytes[pos] = 'X';
    write_text_file(target, bytes);
    CHECK(testutil::thrown_code([&] { open_index(s.index_dir); }) == ErrorCode::Checksum);
  }

  SUBCASE("a missing artifact is caught") {
    fs::remove(s.index_dir / "graph.json");
    CHECK(testutil::thrown_code([&] { open_index(s.index_dir); }) == ErrorCode::Checksum);
  }

  SUBCASE("a missing manifest is an io error") {
    fs::remove(s.index_dir / "manifest.json");
    CHECK(testutil::thrown_code([&] { open_index(s.index_dir); }) == ErrorCode::Io);
  }
}

TEST_CASE("the index lock is exclusive and released on destruction") {
  testutil::TempDir dir;
  const fs::path index_dir = dir.path() / "index";
  fs::create_directories(index_dir);
  {
    IndexLock lock(index_dir);
    CHECK(fs::exists(index_dir / ".lock"));
    CHECK(testutil::thrown_code([&] {
            IndexLock second(index_dir);
          }) == ErrorCode::Locked);
  }
  CHECK_FALSE(fs::exists(index_dir / ".lock"));
  IndexLock again(index_dir);
}

TEST_CASE("a held lock blocks builds until released") {
  BuiltStore s;
  write_text_file(s.index_dir / ".lock", "12345\n");
  auto provider = make_embedding_provider(s.config);
  CHECK(testutil::thrown_code([&] {
          build_index(s.collection, s.index_dir, s.config, *provider);
        }) == ErrorCode::Locked);
  fs::remove(s.index_dir / ".lock");
  const BuildResult result = build_index(s.collection, s.index_dir, s.config, *provider);
  CHECK_FALSE(result.rebuilt);
}

TEST_CASE("qa records are validated while loading") {
  testutil::TempDir dir;
  const fs::path path = dir.path() / "qa.jsonl";

  write_text_file(path,
                  R"({"qa_id":"q01","collection_id":"col","question":"Q1?","answer":"A1."})"
                  "\n\n"
                  R"({"qa_id":"q-2.B_x","question":"Q2?","answer":"A2."})"
                  "\n");
  const auto records = load_qa_jsonl(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].qa_id == "q01");
  CHECK(records[0].collection_id == "col");
  CHECK(records[0].question == "Q1?");
  CHECK(records[0].answer == "A1.");
  CHECK(records[1].qa_id == "q-2.B_x");
  CHECK(records[1].collection_id.empty());

  const auto expect_parse = [&](const std::string& content) {
    write_text_file(path, content);
    CHECK(testutil::thrown_code([&] { load_qa_jsonl(path); }) == ErrorCode::Parse);
  };
  expect_parse("this is not json\n");
  expect_parse(R"({"question":"Q?","answer":"A."})" "\n");
  expect_parse(R"({"qa_id":"has space","question":"Q?","answer":"A."})" "\n");
  expect_parse(R"({"qa_id":"a/b","question":"Q?","answer":"A."})" "\n");
  expect_parse(R"({"qa_id":"q01","question":"","answer":"A."})" "\n");
  expect_parse(R"({"qa_id":"q01","question":"Q?"})" "\n");
  expect_parse(R"({"qa_id":"q01","question":"Q?","answer":"A."})" "\n"
               R"({"qa_id":"q01","question":"Q2?","answer":"A2."})" "\n");
  expect_parse("");
  expect_parse("\n\n");

  CHECK(testutil::thrown_code([&] {
          load_qa_jsonl(dir.path() / "missing.jsonl");
        }) == ErrorCode::Io);
}

TEST_CASE("selection traces round-trip through the trace store") {
  testutil::TempDir dir;
  const fs::path index_dir = dir.path() / "index";
  fs::create_directories(index_dir);

  ContextSelection sel;
  sel.qa_id = "q07";
  sel.answer_clusters = {1, 3};
  sel.related_clusters = {0};
  sel.answer_chunk_ids = {"alpha#00000", "alpha#00001"};
  sel.related_chunk_ids = {"beta#00002"};
  sel.total_tokens = 123;
  HyperParams params;
  write_trace(index_dir, sel, params);

  const auto j = read_trace(index_dir, "q07");
  REQUIRE(j.has_value());
  CHECK(j->at("qa_id") == "q07");
  CHECK(j->at("num_chunks") == 3);
  CHECK(j->at("total_tokens") == 123);
  CHECK(j->at("k") == params.k);
  CHECK(j->at("max_hops") == params.max_hops);
  CHECK(j->at("seed") == params.seed);
  CHECK(j->at("answer_clusters") == nlohmann::json::array({1, 3}));
  CHECK(j->at("related_clusters") == nlohmann::json::array({0}));
  CHECK(j->at("answer_chunk_ids") ==
        nlohmann::json::array({"alpha#00000", "alpha#00001"}));
  CHECK(j->at("related_chunk_ids") == nlohmann::json::array({"beta#00002"}));

  CHECK_FALSE(read_trace(index_dir, "q99").has_value());
}

TEST_CASE("insight sets are stored per question and method") {
  testutil::TempDir dir;
  const fs::path index_dir = dir.path() / "index";
  fs::create_directories(index_dir);

  const InsightSet s1 = small_set("q01", "DIRECT");
  const InsightSet s2 = small_set("q01", "SIM");
  const InsightSet s3 = small_set("q02", "DIRECT");
  write_insight_set(index_dir, s1);
  write_insight_set(index_dir, s2);
  write_insight_set(index_dir, s3);

  const InsightSet back = read_insight_set(index_dir / "results" / "q01" / "DIRECT.json");
  CHECK(back.qa_id == s1.qa_id);
  CHECK(back.method_id == s1.method_id);
  CHECK(back.template_version == s1.template_version);
  CHECK(back.insights == s1.insights);

  SUBCASE("results group by question, ignoring stray files") {
    write_text_file(index_dir / "results" / "q01" / "notes.txt", "ignore me");
    write_text_file(index_dir / "results" / "stray.json", "{}");
    const auto all = load_results(index_dir);
    REQUIRE(all.size() == 2);
    CHECK(all.at("q01").size() == 2);
    CHECK(all.at("q02").size() == 1);
    CHECK(all.at("q01").at("SIM").insights == s2.insights);
  }

  SUBCASE("a result under the wrong question directory is rejected") {
    nlohmann::json j = to_json(s2);  // qa_id q01
    write_json_file(index_dir / "results" / "q02" / "SIM.json", j);
    CHECK(testutil::thrown_code([&] { load_results(index_dir); }) == ErrorCode::Parse);
  }

  SUBCASE("a result whose filename disagrees with its method is rejected") {
    fs::copy_file(index_dir / "results" / "q01" / "DIRECT.json",
                  index_dir / "results" / "q01" / "INSIGHTGEN.json");
    CHECK(testutil::thrown_code([&] { load_results(index_dir); }) == ErrorCode::Parse);
  }
}

TEST_CASE("insight set placement validates identifiers and presence") {
  testutil::TempDir dir;
  const fs::path index_dir = dir.path() / "index";
  fs::create_directories(index_dir);

  InsightSet bad_qa = small_set("q 01", "DIRECT");
  CHECK(testutil::thrown_code([&] {
          write_insight_set(index_dir, bad_qa);
        }) == ErrorCode::Contract);
  InsightSet bad_method = small_set("q01", "");
  CHECK(testutil::thrown_code([&] {
          write_insight_set(index_dir, bad_method);
        }) == ErrorCode::Contract);
  InsightSet slash_method = small_set("q01", "a/b");
  CHECK(testutil::thrown_code([&] {
          write_insight_set(index_dir, slash_method);
        }) == ErrorCode::Contract);

  CHECK(testutil::thrown_code([&] { load_results(index_dir); }) == ErrorCode::Io);
  fs::create_directories(index_dir / "results");
  CHECK(testutil::thrown_code([&] { load_results(index_dir); }) == ErrorCode::Io);
}

}  // namespace
