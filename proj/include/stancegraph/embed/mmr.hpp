#pragma once

#include <span>
#include <vector>

#include "stancegraph/core/ids.hpp"

namespace stancegraph::embed {

/// Relevance/diversity weight and pool size used by the mining retrieval.
inline constexpr double kDefaultMmrLambda = 0.8;
inline constexpr std::size_t kDefaultRetrieveK = 25;

struct MmrCandidate {
  ParagraphId id;
  std::span<const double> vector;
};

/// Maximal Marginal Relevance selection.
///
/// The first pick is the candidate most similar to the query. Each following
/// pick maximises
///
///     lambda * cos(d, query) - (1 - lambda) * max_{s in selected} cos(d, s)
///
/// over the remaining candidates. Ties go to the smaller paragraph id.
/// Returns min(k, |candidates|) ids in selection order. Because selection is
/// greedy, the result for k is always a prefix of the result for k + 1.
///
/// Throws ValidationError when lambda is outside [0, 1], k is 0, or two
/// candidates share an id.
std::vector<ParagraphId> mmr_select(std::span<const double> query, std::span<const MmrCandidate> candidates,
                                    std::size_t k, double lambda);

}  // namespace stancegraph::embed
