#pragma once

#include <cstdint>
#include <vector>

#include "stancegraph/core/types.hpp"

namespace stancegraph::topics {

inline constexpr std::size_t kMaxClusters = 10;
inline constexpr std::uint64_t kDefaultClusterSeed = 42;

struct Clustering {
  /// Member indices per cluster, each ascending; clusters ordered by their
  /// smallest member.
  std::vector<std::vector<std::size_t>> clusters;
  std::size_t k = 0;
  /// Eigenvalues of the normalized Laplacian, ascending.
  std::vector<double> eigenvalues;
};

/// Spectral clustering over the affinity max(0, cos(e_i, e_j)) with unit
/// self-affinity. The cluster count is the larger of the number of connected
/// components (zero eigenvalues) and the position of the largest eigengap of
/// the symmetric normalized Laplacian, capped at kMaxClusters. The spectral
/// embedding is row-normalized and split by k-means++ (10 seeded restarts).
/// Fewer than two inputs give a single cluster.
Clustering spectral_cluster(const std::vector<Embedding>& embeddings, std::uint64_t seed = kDefaultClusterSeed);

}  // namespace stancegraph::topics
