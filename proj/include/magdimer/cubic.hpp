#pragma once

#include <vector>

namespace magdimer {

/// Real nonnegative roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, each
/// polished by Newton and deduplicated at relative tolerance 1e-9.
///
/// A vanishing leading coefficient is a DomainError unless
/// `allow_degenerate` is set, in which case the quadratic or linear
/// polynomial is solved. All-zero coefficients are always a DomainError.
std::vector<double> solve_cubic_positive_roots(double c3, double c2, double c1, double c0,
                                               bool allow_degenerate = false);

}  // namespace magdimer
