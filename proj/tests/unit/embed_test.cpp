#include <gtest/gtest.h>

#include <random>

#include "graph_builders.hpp"
#include "oracles.hpp"
#include "stancegraph/core/error.hpp"
#include "stancegraph/embed/embedder.hpp"
#include "stancegraph/embed/index.hpp"
#include "stancegraph/embed/mmr.hpp"
#include "stancegraph/embed/vector.hpp"

namespace stancegraph::embed {
namespace {

std::vector<oracle::Item> random_items(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::vector<oracle::Item> items;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "p%05zu", (i * 7919) % 100000);
    items.push_back({id, testing::random_unit(rng, dim)});
  }
  return items;
}

std::vector<ParagraphId> run_mmr(const Embedding& q, const std::vector<oracle::Item>& items, std::size_t k,
                                 double lambda) {
  std::vector<MmrCandidate> cands;
  for (const auto& it : items) cands.push_back({ParagraphId(it.id), it.v});
  return mmr_select(q, cands, k, lambda);
}

std::vector<std::string> values(const std::vector<ParagraphId>& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.value);
  return out;
}

TEST(Vector, CosineAgainstOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 200; ++i) {
    Embedding a(1 + i % 9), b(a.size());
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng);
    EXPECT_DOUBLE_EQ(cosine(a, b), oracle::cos_sim(a, b));
  }
  const Embedding x{1, 2, 3};
  EXPECT_DOUBLE_EQ(cosine(x, x), 1.0);
  EXPECT_DOUBLE_EQ(cosine(x, Embedding{-1, -2, -3}), -1.0);
}

TEST(Vector, CosineRejectsBadInput) {
  EXPECT_THROW(cosine(Embedding{1, 0}, Embedding{1, 0, 0}), ValidationError);
  EXPECT_THROW(cosine(Embedding{0, 0}, Embedding{1, 0}), ValidationError);
  EXPECT_THROW(check_vector(Embedding{1, std::nan("")}), ValidationError);
  EXPECT_THROW(check_vector(Embedding{}), ValidationError);
}

TEST(FeatureHash, DeterministicUnitNormAndVocabularySensitive) {
  FeatureHashEmbedder e(128);
  const auto a = e.embed("Hydrogen leaks threaten the harbour");
  EXPECT_EQ(a, e.embed("Hydrogen leaks threaten the harbour"));
  EXPECT_EQ(a.size(), 128u);
  double norm = 0;
  for (double x : a) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  const double close = cosine(a, e.embed("hydrogen leaks in the harbour"));
  const double far = cosine(a, e.embed("ticket prices for the football match"));
  EXPECT_GT(close, far);
  EXPECT_THROW(e.embed("   "), ValidationError);
  EXPECT_NE(FeatureHashEmbedder(128, 1).embed("jobs"), FeatureHashEmbedder(128, 2).embed("jobs"));
}

TEST(VectorIndex, SearchMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 30; ++round) {
    const auto items = random_items(rng, 1 + rng() % 60, 6);
    VectorIndex index;
    for (const auto& it : items) index.add(ParagraphId(it.id), it.v);
    const auto q = testing::random_unit(rng, 6);
    const std::size_t n = 1 + rng() % 15;
    const auto hits = index.search(q, {}, n);
    std::vector<std::string> got;
    for (const auto& h : hits) got.push_back(h.paragraph_id.value);
    EXPECT_EQ(got, oracle::top_k(q, items, n));
    for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_FALSE(hit_order(hits[i], hits[i - 1]));
  }
}

TEST(VectorIndex, FilterAndEmptySet) {
  VectorIndex index;
  index.add(ParagraphId("a"), {1, 0});
  index.add(ParagraphId("b"), {0, 1});
  EXPECT_THROW(index.add(ParagraphId("c"), {1, 0, 0}), ValidationError);
  const Embedding q{1, 0};
  auto hits = index.search(q, [](const ParagraphId& id) { return id.value == "b"; }, 5);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].paragraph_id.value, "b");
  EXPECT_TRUE(index.search(q, [](const ParagraphId&) { return false; }, 5).empty());
}

TEST(Fulltext, CountsTokenOccurrencesAndFilters) {
  DebateGraph g(testing::sample_debate());
  auto ids = testing::add_document(g, "d", "2023-01-01",
                                   {"Jobs, jobs and more JOBS.", "No match here.", "Jobs and hydrogen."});
  auto hits = fulltext_search(g, "jobs hydrogen", 10);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].paragraph_id, ids[0]);
  EXPECT_DOUBLE_EQ(hits[0].score, 3.0);
  EXPECT_DOUBLE_EQ(hits[1].score, 2.0);
  EXPECT_TRUE(fulltext_search(g, "  ", 10).empty());
  hits = fulltext_search(g, "jobs", 10, [&](const Paragraph& p) { return p.id == ids[2]; });
  ASSERT_EQ(hits.size(), 1u);
}

TEST(Mmr, MatchesNaiveOracle) {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 60; ++round) {
    const std::size_t dim = 2 + rng() % 10;
    auto items = random_items(rng, 1 + rng() % 80, dim);
    // Exact duplicates force score ties, resolved by id.
    if (items.size() > 3) items.push_back({"a-dup", items[1].v});
    const auto q = testing::random_unit(rng, dim);
    for (double lambda : {0.0, 0.3, 0.5, 0.8, 1.0}) {
      const std::size_t k = 1 + rng() % 25;
      EXPECT_EQ(values(run_mmr(q, items, k, lambda)), oracle::mmr(q, items, k, lambda))
          << "round " << round << " lambda " << lambda;
    }
  }
}

TEST(Mmr, LambdaOneIsPlainTopK) {
  std::mt19937_64 rng(9);
  for (int round = 0; round < 50; ++round) {
    const auto items = random_items(rng, 1 + rng() % 100, 8);
    const auto q = testing::random_unit(rng, 8);
    const std::size_t k = 1 + rng() % 25;
    EXPECT_EQ(values(run_mmr(q, items, k, 1.0)), oracle::top_k(q, items, k));
  }
}

TEST(Mmr, PrefixPropertyAndSizes) {
  std::mt19937_64 rng(13);
  const auto items = random_items(rng, 40, 5);
  const auto q = testing::random_unit(rng, 5);
  const auto full = run_mmr(q, items, 30, 0.6);
  for (std::size_t k = 1; k < 30; ++k) {
    const auto part = run_mmr(q, items, k, 0.6);
    ASSERT_EQ(part.size(), k);
    EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
  }
  EXPECT_EQ(run_mmr(q, items, 100, 0.6).size(), items.size());
  EXPECT_TRUE(run_mmr(q, {}, 5, 0.6).empty());
}

TEST(Mmr, FirstPickIsMostRelevantAndLowLambdaDiversifies) {
  // Two near-identical documents close to the query and one orthogonal-ish.
  const Embedding q{1, 0};
  std::vector<oracle::Item> items{{"a", {1, 0.01}}, {"b", {1, 0.02}}, {"c", {0.6, 0.8}}};
  EXPECT_EQ(values(run_mmr(q, items, 2, 1.0)), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(values(run_mmr(q, items, 2, 0.3)), (std::vector<std::string>{"a", "c"}));
}

TEST(Mmr, RejectsInvalidParameters) {
  const Embedding q{1, 0};
  std::vector<oracle::Item> items{{"a", {1, 0}}, {"a", {0, 1}}};
  EXPECT_THROW(run_mmr(q, items, 1, 0.5), ValidationError);
  items[1].id = "b";
  EXPECT_THROW(run_mmr(q, items, 0, 0.5), ValidationError);
  EXPECT_THROW(run_mmr(q, items, 1, 1.5), ValidationError);
  EXPECT_THROW(run_mmr(q, items, 1, -0.1), ValidationError);
}

}  // namespace
}  // namespace stancegraph::embed
