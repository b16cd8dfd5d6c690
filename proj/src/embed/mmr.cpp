#include "stancegraph/embed/mmr.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "stancegraph/core/error.hpp"
#include "stancegraph/embed/vector.hpp"

namespace stancegraph::embed {

std::vector<ParagraphId> mmr_select(std::span<const double> query, std::span<const MmrCandidate> candidates,
                                    std::size_t k, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("mmr lambda must lie in [0, 1]");
  if (k == 0) throw ValidationError("mmr k must be at least 1");
  {
    std::set<ParagraphId> seen;
    for (const auto& c : candidates) {
      if (!seen.insert(c.id).second) throw ValidationError("duplicate mmr candidate '" + c.id.value + "'");
    }
  }

  const std::size_t n = candidates.size();
  std::vector<double> relevance(n);
  for (std::size_t i = 0; i < n; ++i) relevance[i] = cosine(candidates[i].vector, query);

  // Largest similarity of each remaining candidate to anything selected so far.
  std::vector<double> redundancy(n, 0.0);
  std::vector<bool> taken(n, false);
  std::vector<ParagraphId> selected;
  selected.reserve(std::min(k, n));

  while (selected.size() < std::min(k, n)) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double score =
          selected.empty() ? relevance[i] : lambda * relevance[i] - (1.0 - lambda) * redundancy[i];
      if (best == n || score > best_score || (score == best_score && candidates[i].id < candidates[best].id)) {
        best = i;
        best_score = score;
      }
    }
    taken[best] = true;
    selected.push_back(candidates[best].id);
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double sim = cosine(candidates[i].vector, candidates[best].vector);
      if (selected.size() == 1 || sim > redundancy[i]) redundancy[i] = sim;
    }
  }
  return selected;
}

}  // namespace stancegraph::embed
