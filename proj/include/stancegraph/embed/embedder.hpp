#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "stancegraph/core/types.hpp"

namespace stancegraph::embed {

/// Text embedding provider seam.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::string id() const = 0;
  /// Throws ValidationError on empty text; provider failures surface as Error.
  virtual Embedding embed(std::string_view text) = 0;
};

/// Deterministic offline embedder: signed feature hashing of case-folded word
/// unigrams and bigrams into a fixed number of buckets, L2-normalized. Texts
/// sharing vocabulary get high cosine; it needs no network and no model.
class FeatureHashEmbedder final : public Embedder {
 public:
  explicit FeatureHashEmbedder(std::size_t dimension = 256, std::uint64_t seed = 0x5eed);

  std::size_t dimension() const override { return dimension_; }
  std::string id() const override;
  Embedding embed(std::string_view text) override;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

struct HttpEmbedderOptions {
  std::string endpoint;  ///< e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model = "text-embedding-3-small";
  std::size_t dimension = 0;  ///< expected dimension, 0 = accept what the provider returns
  int max_attempts = 3;
  int timeout_seconds = 60;
};

/// OpenAI-compatible `/embeddings` client.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderOptions options);

  std::size_t dimension() const override { return options_.dimension; }
  std::string id() const override { return "http:" + options_.model; }
  Embedding embed(std::string_view text) override;

 private:
  HttpEmbedderOptions options_;
};

}  // namespace stancegraph::embed
