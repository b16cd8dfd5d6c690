#pragma once

#include <span>

#include "stancegraph/core/types.hpp"

namespace stancegraph::embed {

/// u·v / (‖u‖‖v‖). Throws ValidationError on a dimension mismatch or when
/// either vector is all zeros. The result is clamped to [-1, 1].
double cosine(std::span<const double> u, std::span<const double> v);

/// Throws ValidationError unless the vector is non-empty, finite and of the
/// expected dimension (0 skips the dimension check).
void check_vector(std::span<const double> v, std::size_t dimension = 0);

/// Scales to unit L2 norm; zero vectors are returned unchanged.
Embedding l2_normalized(Embedding v);

}  // namespace stancegraph::embed
