#include "insightgen/embedding.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "insightgen/rng.hpp"

namespace insightgen {

Vec l2_normalize(const Vec& v) {
  require(v.size() > 0, ErrorCode::Contract, "l2_normalize: empty vector");
  const double norm = vector_norm(v);
  require(norm > 1e-12, ErrorCode::Contract, "l2_normalize: near-zero vector");
  if (std::abs(norm - 1.0) <= 1e-6) return v;
  return (v.cast<double>() / norm).cast<float>();
}

double similarity(const Vec& a, const Vec& b, Metric metric) {
  require(a.size() == b.size(), ErrorCode::Contract,
          "similarity: dimension mismatch");
  require(a.size() > 0, ErrorCode::Contract, "similarity: empty vectors");
  const Eigen::VectorXd da = a.cast<double>();
  const Eigen::VectorXd db = b.cast<double>();
  if (metric == Metric::Euclidean) return (da - db).norm();
  const double na = da.norm();
  const double nb = db.norm();
  require(na > 1e-12 && nb > 1e-12, ErrorCode::Contract,
          "similarity: zero vector under cosine");
  return std::clamp(da.dot(db) / (na * nb), -1.0, 1.0);
}

std::vector<Vec> embed_normalized(EmbeddingProvider& provider,
                                  const std::vector<std::string>& texts) {
  require(!texts.empty(), ErrorCode::Contract, "embed_batch: empty input");
  std::vector<Vec> raw = provider.embed_batch(texts);
  require(raw.size() == texts.size(), ErrorCode::Protocol,
          "embed_batch: provider returned wrong vector count");
  const Eigen::Index dim = raw.front().size();
  for (Vec& v : raw) {
    require(v.size() == dim, ErrorCode::Protocol,
            "embed_batch: inconsistent dimensions in batch");
    v = l2_normalize(v);
  }
  return raw;
}

MockEmbeddingProvider::MockEmbeddingProvider(int dim, std::string model_id)
    : dim_(dim), model_id_(std::move(model_id)) {
  require(dim_ > 0, ErrorCode::Contract, "mock embedding dim must be positive");
}

Vec MockEmbeddingProvider::embed_one(const std::string& model_id,
                                     const std::string& text, int dim) {
  std::uint64_t state = fnv1a64(model_id);
  state = fnv1a64_byte(0x1f, state);
  state = fnv1a64(text, state);
  Eigen::VectorXd v(dim);
  for (int j = 0; j < dim; ++j) {
    v[j] = unit_double(splitmix64(state)) * 2.0 - 1.0;
  }
  const double norm = v.norm();
  if (norm <= 1e-12) {
    v.setZero();
    v[0] = 1.0;
    return v.cast<float>();
  }
  return (v / norm).cast<float>();
}

std::vector<Vec> MockEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) {
  require(!texts.empty(), ErrorCode::Contract, "embed_batch: empty input");
  std::vector<Vec> out;
  out.reserve(texts.size());
  for (const std::string& text : texts) {
    out.push_back(embed_one(model_id_, text, dim_));
  }
  return out;
}

namespace {

struct ParsedEndpoint {
  std::string base;
  std::string path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  require(scheme_end != std::string::npos, ErrorCode::Config,
          "endpoint must include a scheme: " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string endpoint, std::string api_key,
                        std::string model_id, int max_retries)
      : endpoint_(std::move(endpoint)),
        api_key_(std::move(api_key)),
        model_id_(std::move(model_id)),
        max_retries_(max_retries) {}

  std::string provider_id() const override { return "http"; }
  std::string model_id() const override { return model_id_; }
  int dim() const override { return dim_; }

  std::vector<Vec> embed_batch(const std::vector<std::string>& texts) override {
    require(!texts.empty(), ErrorCode::Contract, "embed_batch: empty input");
    nlohmann::json body;
    body["model"] = model_id_;
    body["input"] = texts;
    const std::string reply = post_with_retry(body.dump());
    return parse_reply(reply, texts.size());
  }

 private:
  std::string post_with_retry(const std::string& payload) {
    const ParsedEndpoint ep = parse_endpoint(endpoint_);
    std::string last_error;
    for (int attempt = 0; attempt <= max_retries_; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(250 << (attempt - 1)));
      }
      httplib::Client client(ep.base);
      client.set_read_timeout(120, 0);
      httplib::Headers headers;
      if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
      auto res = client.Post(ep.path, headers, payload, "application/json");
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "status " + std::to_string(res->status);
        continue;
      }
      require(res->status >= 200 && res->status < 300, ErrorCode::Provider,
              "embedding endpoint returned status " + std::to_string(res->status));
      return res->body;
    }
    raise(ErrorCode::Provider, "embedding request failed after retries: " + last_error);
  }

  std::vector<Vec> parse_reply(const std::string& reply, std::size_t expected) {
    nlohmann::json j = nlohmann::json::parse(reply, nullptr, false);
    require(!j.is_discarded() && j.contains("data") && j["data"].is_array(),
            ErrorCode::Protocol, "embedding reply is not a data array");
    const auto& data = j["data"];
    require(data.size() == expected, ErrorCode::Protocol,
            "embedding reply has wrong vector count");
    std::vector<Vec> out;
    out.reserve(expected);
    for (const auto& item : data) {
      require(item.contains("embedding") && item["embedding"].is_array(),
              ErrorCode::Protocol, "embedding reply entry missing vector");
      const auto& arr = item["embedding"];
      Vec v(static_cast<Eigen::Index>(arr.size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = arr[static_cast<std::size_t>(i)].get<float>();
      }
      out.push_back(std::move(v));
    }
    if (!out.empty()) dim_ = static_cast<int>(out.front().size());
    return out;
  }

  std::string endpoint_;
  std::string api_key_;
  std::string model_id_;
  int max_retries_;
  int dim_ = 0;
};

}  // namespace

std::unique_ptr<EmbeddingProvider> make_http_embedding_provider(
    const std::string& endpoint, const std::string& api_key,
    const std::string& model_id, int max_retries) {
  require(!endpoint.empty(), ErrorCode::Config, "embedding endpoint not configured");
  require(!model_id.empty(), ErrorCode::Config, "embedding model not configured");
  return std::make_unique<HttpEmbeddingProvider>(endpoint, api_key, model_id,
                                                 max_retries);
}

}  // namespace insightgen
