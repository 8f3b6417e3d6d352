#pragma once

// Dense linear assignment: the direction-finding and rounding step of the
// Frank-Wolfe matcher.

#include "gmlab/common.hpp"
#include "gmlab/permutation.hpp"

namespace gmlab {

struct Assignment {
  Permutation permutation;
  double value = 0.0;
};

/// Largest n for which optimal ties are broken toward the lexicographically
/// smallest image. Above it the result is still deterministic.
inline constexpr std::size_t kLexTieBreakMaxN = 9;

/// Maximises sum_i score(i, tau(i)) exactly with an O(n^3)
/// shortest-augmenting-path method. Throws NumericError on non-finite input.
Assignment solve_lap_max(const Matrix& score);

/// Exhaustive maximisation over all n! permutations, n <= 9.
Assignment brute_force_lap(const Matrix& score);

}  // namespace gmlab
