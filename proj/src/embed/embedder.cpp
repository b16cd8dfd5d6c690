#include "stancegraph/embed/embedder.hpp"

#include <array>
#include <chrono>
#include <thread>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/http_json.hpp"
#include "stancegraph/core/text.hpp"
#include "stancegraph/embed/vector.hpp"

namespace stancegraph::embed {
namespace {

constexpr std::array<std::string_view, 48> kStopwords{
    "a",    "an",   "and",  "are",  "as",   "at",   "be",    "by",   "for",  "from", "has",  "have",
    "he",   "her",  "his",  "in",   "is",   "it",   "its",   "of",   "on",   "or",   "that", "the",
    "their", "they", "this", "to",  "was",  "were", "which", "will", "with", "would", "we",  "our",
    "not",  "but",  "been", "also", "than", "more", "can",   "said", "who",  "there", "these", "into"};

bool is_stopword(std::string_view token) {
  for (auto s : kStopwords) {
    if (s == token) return true;
  }
  return false;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_feature(std::string_view feature, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ mix(seed);
  for (unsigned char c : feature) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(h);
}

}  // namespace

FeatureHashEmbedder::FeatureHashEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension == 0) throw ValidationError("embedding dimension must be positive");
}

std::string FeatureHashEmbedder::id() const {
  return "feature-hash/" + std::to_string(dimension_) + "/" + std::to_string(seed_);
}

Embedding FeatureHashEmbedder::embed(std::string_view input) {
  if (text::trim(input).empty()) throw ValidationError("cannot embed empty text");
  std::vector<std::string> tokens;
  for (auto& t : text::tokenize(input)) {
    if (!is_stopword(t)) tokens.push_back(std::move(t));
  }
  Embedding v(dimension_, 0.0);
  auto add = [&](std::string_view feature, double weight) {
    const std::uint64_t h = hash_feature(feature, seed_);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[h % dimension_] += sign * weight;
  };
  if (tokens.empty()) {
    add(text::trim(input), 1.0);
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    add(tokens[i], 1.0);
    if (i + 1 < tokens.size()) add(tokens[i] + ' ' + tokens[i + 1], 0.5);
  }
  bool nonzero = false;
  for (double x : v) nonzero = nonzero || x != 0.0;
  if (!nonzero) add("\x01" + std::string(input), 1.0);  // every feature cancelled out
  return l2_normalized(std::move(v));
}

HttpEmbedder::HttpEmbedder(HttpEmbedderOptions options) : options_(std::move(options)) {}

Embedding HttpEmbedder::embed(std::string_view input) {
  if (text::trim(input).empty()) throw ValidationError("cannot embed empty text");
  const json body{{"model", options_.model}, {"input", std::string(input)}};
  for (int attempt = 1;; ++attempt) {
    try {
      const json res = post_json(options_.endpoint, "/embeddings", options_.api_key, body, options_.timeout_seconds);
      Embedding v = res.at("data").at(0).at("embedding").get<Embedding>();
      check_vector(v, options_.dimension);
      return v;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= options_.max_attempts) throw;
      std::this_thread::sleep_for(std::chrono::milliseconds(200) * (1 << (attempt - 1)));
    } catch (const json::exception& e) {
      throw TransportError(std::string("malformed embedding response: ") + e.what(), false);
    }
  }
}

}  // namespace stancegraph::embed
