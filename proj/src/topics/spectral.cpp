#include "stancegraph/topics/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stancegraph/embed/vector.hpp"

namespace stancegraph::topics {
namespace {

constexpr int kRestarts = 10;
constexpr int kMaxIterations = 100;
constexpr double kZeroEigenvalue = 1e-9;

/// Uniform double in [0, 1) from the raw engine output, so results do not
/// depend on the standard library's distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct KMeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KMeansRun kmeans_once(const Eigen::MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<Eigen::VectorXd> centers;
  centers.push_back(x.row(static_cast<Eigen::Index>(rng() % n)).transpose());
  std::vector<double> d2(n);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, (x.row(static_cast<Eigen::Index>(i)).transpose() - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double r = unit(rng) * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (r < d2[i]) {
          pick = i;
          break;
        }
        r -= d2[i];
      }
    } else {
      pick = static_cast<std::size_t>(rng() % n);
    }
    centers.push_back(x.row(static_cast<Eigen::Index>(pick)).transpose());
  }

  KMeansRun run;
  run.labels.assign(n, -1);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (x.row(static_cast<Eigen::Index>(i)).transpose() - centers[c]).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (run.labels[i] != best) {
        run.labels[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (std::size_t c = 0; c < k; ++c) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.cols());
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (run.labels[i] == static_cast<int>(c)) {
          sum += x.row(static_cast<Eigen::Index>(i)).transpose();
          ++count;
        }
      }
      if (count > 0) centers[c] = sum / static_cast<double>(count);
    }
  }
  run.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run.inertia += (x.row(static_cast<Eigen::Index>(i)).transpose() - centers[static_cast<std::size_t>(run.labels[i])]).squaredNorm();
  }
  return run;
}

}  // namespace

Clustering spectral_cluster(const std::vector<Embedding>& embeddings, std::uint64_t seed) {
  Clustering result;
  const std::size_t n = embeddings.size();
  if (n < 2) {
    if (n == 1) result.clusters = {{0}};
    result.k = n;
    if (n == 1) result.eigenvalues = {0.0};
    return result;
  }

  Eigen::MatrixXd affinity(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    affinity(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = std::max(0.0, embed::cosine(embeddings[i], embeddings[j]));
      affinity(i, j) = a;
      affinity(j, i) = a;
    }
  }
  const Eigen::VectorXd inv_sqrt_degree = affinity.rowwise().sum().array().rsqrt();
  const Eigen::MatrixXd laplacian = Eigen::MatrixXd::Identity(n, n) -
                                    inv_sqrt_degree.asDiagonal() * affinity * inv_sqrt_degree.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  const Eigen::VectorXd& values = solver.eigenvalues();
  result.eigenvalues.assign(values.data(), values.data() + values.size());

  std::size_t components = 0;
  for (double v : result.eigenvalues) components += v < kZeroEigenvalue ? 1 : 0;
  const std::size_t limit = std::min(kMaxClusters, n - 1);
  std::size_t gap_k = 1;
  double best_gap = -1.0;
  for (std::size_t k = 1; k <= limit; ++k) {
    const double gap = values(static_cast<Eigen::Index>(k)) - values(static_cast<Eigen::Index>(k - 1));
    if (gap > best_gap + 1e-12) {
      best_gap = gap;
      gap_k = k;
    }
  }
  const std::size_t k = std::min({std::max(components, gap_k), kMaxClusters, n});
  result.k = k;

  std::vector<int> labels(n, 0);
  if (k > 1) {
    Eigen::MatrixXd x = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(k));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double norm = x.row(i).norm();
      if (norm > 0.0) x.row(i) /= norm;
    }
    std::mt19937_64 rng(seed);
    KMeansRun best;
    for (int r = 0; r < kRestarts; ++r) {
      auto run = kmeans_once(x, k, rng);
      if (run.inertia < best.inertia - 1e-12) best = std::move(run);
    }
    labels = std::move(best.labels);
  }

  std::vector<int> canonical(k, -1);
  for (std::size_t i = 0; i < n; ++i) {
    auto& slot = canonical[static_cast<std::size_t>(labels[i])];
    if (slot < 0) {
      slot = static_cast<int>(result.clusters.size());
      result.clusters.emplace_back();
    }
    result.clusters[static_cast<std::size_t>(slot)].push_back(i);
  }
  return result;
}

}  // namespace stancegraph::topics
