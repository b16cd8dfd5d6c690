#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stancegraph/core/graph.hpp"

namespace stancegraph::embed {

struct ScoredHit {
  ParagraphId paragraph_id;
  double score = 0.0;

  friend bool operator==(const ScoredHit&, const ScoredHit&) = default;
};

/// Orders hits by descending score, ties by ascending paragraph id.
bool hit_order(const ScoredHit& a, const ScoredHit& b);

/// In-process exact-scan vector index over paragraph embeddings. Built once
/// per pipeline run from a frozen graph snapshot and immutable afterwards.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(std::size_t dimension) : dimension_(dimension) {}

  /// Indexes every embedded paragraph of the graph.
  static VectorIndex from_graph(const DebateGraph& graph);

  void add(ParagraphId id, Embedding vector);
  std::size_t size() const noexcept { return vectors_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const Embedding* find(const ParagraphId& id) const;

  using Filter = std::function<bool(const ParagraphId&)>;

  /// Top-n hits by cosine among the entries accepted by `filter` (all when
  /// empty). An empty filtered set yields an empty list.
  std::vector<ScoredHit> search(std::span<const double> query, const Filter& filter, std::size_t n) const;

 private:
  std::size_t dimension_ = 0;
  std::map<ParagraphId, Embedding> vectors_;
};

/// Case-folded token matching; score is the number of query-token
/// occurrences in the paragraph. Ties by ascending id.
std::vector<ScoredHit> fulltext_search(const DebateGraph& graph, std::string_view query, std::size_t limit,
                                       const std::function<bool(const Paragraph&)>& filter = {});

}  // namespace stancegraph::embed
