#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "insightgen/errors.hpp"

namespace insightgen {

using Vec = Eigen::VectorXf;
using Mat = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Metric { Cosine, Euclidean };

// Norm of any Eigen expression, accumulated in double.
template <typename Derived>
double vector_norm(const Eigen::MatrixBase<Derived>& v) {
  return v.derived().template cast<double>().norm();
}

template <typename DerivedA, typename DerivedB>
double squared_distance(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b) {
  return (a.derived().template cast<double>() - b.derived().template cast<double>())
      .squaredNorm();
}

// Unit-normalizes v. Vectors already unit within 1e-6 pass through
// unchanged, which makes the operation idempotent. Near-zero norm is
// rejected.
Vec l2_normalize(const Vec& v);

// Cosine or Euclidean score in double precision. Cosine is clamped to
// [-1, 1]; dimension mismatch is a contract violation.
double similarity(const Vec& a, const Vec& b, Metric metric);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string provider_id() const = 0;
  virtual std::string model_id() const = 0;
  // 0 while the dimension is not yet known (remote providers).
  virtual int dim() const = 0;
  // Raw vectors, one per input text, all of equal dimension.
  virtual std::vector<Vec> embed_batch(const std::vector<std::string>& texts) = 0;
};

// Validates and unit-normalizes a provider batch; empty input and
// inconsistent dimensions are rejected.
std::vector<Vec> embed_normalized(EmbeddingProvider& provider,
                                  const std::vector<std::string>& texts);

// Deterministic offline provider: each vector is a pure function of
// (model_id, text). The rule is fixed: seed = FNV-1a over model_id, one
// 0x1f separator byte, then the text; the seed drives a splitmix64 stream
// mapped to doubles in [-1, 1), and the result is unit-normalized.
class MockEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(int dim = 64, std::string model_id = "mock-embed");

  std::string provider_id() const override { return "mock"; }
  std::string model_id() const override { return model_id_; }
  int dim() const override { return dim_; }
  std::vector<Vec> embed_batch(const std::vector<std::string>& texts) override;

  static Vec embed_one(const std::string& model_id, const std::string& text, int dim);

 private:
  int dim_;
  std::string model_id_;
};

// Remote provider speaking a JSON embeddings API. Transient transport
// failures are retried with exponential backoff before surfacing as
// provider errors.
std::unique_ptr<EmbeddingProvider> make_http_embedding_provider(
    const std::string& endpoint, const std::string& api_key,
    const std::string& model_id, int max_retries = 3);

}  // namespace insightgen
