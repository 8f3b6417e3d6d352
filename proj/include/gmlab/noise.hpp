#pragma once

#include "gmlab/common.hpp"

#include <cstdint>
#include <vector>

namespace gmlab {

/// Adds C ~ ER(|subset|, q) to the subgraph of b induced by subset and
/// re-binarises. C is the first graph of sample_pair on the homogeneous
/// spec (|subset|, q, q, 0) with the same seed, placed so that local index
/// i maps to subset[i]. Entries outside the induced subgraph are untouched.
Matrix inject_block_noise(const Matrix& b, const std::vector<std::size_t>& subset, double q, std::uint64_t seed);

/// `count` distinct vertices of [0, n) drawn uniformly from the seed, sorted.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace gmlab
