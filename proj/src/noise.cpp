#include "gmlab/noise.hpp"

#include "gmlab/corr_er.hpp"
#include "gmlab/permutation.hpp"

#include <algorithm>

namespace gmlab {

Matrix inject_block_noise(const Matrix& b, const std::vector<std::size_t>& subset, double q, std::uint64_t seed) {
  require_square(b, "inject_block_noise");
  if (!(q >= 0.0 && q <= 1.0)) {
    throw ValidationError("inject_block_noise: q must lie in [0, 1]");
  }
  std::vector<bool> seen(static_cast<std::size_t>(b.rows()), false);
  for (std::size_t v : subset) {
    if (v >= seen.size()) {
      throw ValidationError("inject_block_noise: vertex " + std::to_string(v) + " out of range");
    }
    if (seen[v]) {
      throw ValidationError("inject_block_noise: vertex " + std::to_string(v) + " repeated");
    }
    seen[v] = true;
  }
  Matrix out = b;
  if (subset.size() < 2) return out;
  const Matrix c = sample_pair(homogeneous_spec(subset.size(), q, q, 0.0), seed).a;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      const auto u = static_cast<Eigen::Index>(subset[i]);
      const auto v = static_cast<Eigen::Index>(subset[j]);
      const double value = std::min(1.0, out(u, v) + c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out(u, v) = out(v, u) = value;
    }
  }
  return out;
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (count > n) {
    throw ValidationError("random_subset: count exceeds n");
  }
  const Permutation shuffle = Permutation::random(n, seed);
  std::vector<std::size_t> out(shuffle.image().begin(), shuffle.image().begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gmlab
