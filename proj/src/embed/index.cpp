#include "stancegraph/embed/index.hpp"

#include <algorithm>
#include <set>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/text.hpp"
#include "stancegraph/embed/vector.hpp"

namespace stancegraph::embed {

bool hit_order(const ScoredHit& a, const ScoredHit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.paragraph_id < b.paragraph_id;
}

VectorIndex VectorIndex::from_graph(const DebateGraph& graph) {
  VectorIndex index;
  for (const auto& [id, p] : graph.paragraphs()) {
    if (p.embedding) index.add(id, *p.embedding);
  }
  return index;
}

void VectorIndex::add(ParagraphId id, Embedding vector) {
  check_vector(vector, dimension_);
  if (dimension_ == 0) dimension_ = vector.size();
  vectors_[std::move(id)] = std::move(vector);
}

const Embedding* VectorIndex::find(const ParagraphId& id) const {
  auto it = vectors_.find(id);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<ScoredHit> VectorIndex::search(std::span<const double> query, const Filter& filter, std::size_t n) const {
  std::vector<ScoredHit> hits;
  for (const auto& [id, v] : vectors_) {
    if (filter && !filter(id)) continue;
    hits.push_back({id, cosine(query, v)});
  }
  const std::size_t keep = std::min(n, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), hit_order);
  hits.resize(keep);
  return hits;
}

std::vector<ScoredHit> fulltext_search(const DebateGraph& graph, std::string_view query, std::size_t limit,
                                       const std::function<bool(const Paragraph&)>& filter) {
  const auto tokens = text::tokenize(query);
  const std::set<std::string> wanted(tokens.begin(), tokens.end());
  std::vector<ScoredHit> hits;
  if (wanted.empty()) return hits;
  for (const auto& [id, p] : graph.paragraphs()) {
    if (filter && !filter(p)) continue;
    int matches = 0;
    for (const auto& t : text::tokenize(p.text)) matches += wanted.contains(t) ? 1 : 0;
    if (matches > 0) hits.push_back({id, static_cast<double>(matches)});
  }
  std::sort(hits.begin(), hits.end(), hit_order);
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

}  // namespace stancegraph::embed
