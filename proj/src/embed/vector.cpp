#include "stancegraph/embed/vector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stancegraph/core/error.hpp"

namespace stancegraph::embed {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ValidationError("dimension mismatch: " + std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ValidationError("cosine of a zero vector is undefined");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

void check_vector(std::span<const double> v, std::size_t dimension) {
  if (v.empty()) throw ValidationError("empty embedding");
  if (dimension != 0 && v.size() != dimension) {
    throw ValidationError("embedding dimension " + std::to_string(v.size()) + " does not match index dimension " +
                          std::to_string(dimension));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError("embedding has a non-finite component");
  }
}

Embedding l2_normalized(Embedding v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) return v;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace stancegraph::embed
