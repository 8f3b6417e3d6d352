#pragma once

#include "gmlab/common.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gmlab {

/// A bijection tau on {0, ..., n-1}. As a matrix, P(i, tau(i)) = 1, so
/// (P B P^T)(u, v) = B(tau(u), tau(v)): vertex u of the first graph is
/// aligned with vertex tau(u) of the second.
class Permutation {
 public:
  Permutation() = default;

  /// Throws ValidationError unless image is a bijection on [0, size).
  explicit Permutation(std::vector<std::size_t> image);

  static Permutation identity(std::size_t n);

  /// Swaps the first and second half: i <-> i + n/2. n must be even.
  static Permutation block_swap(std::size_t n);

  /// Uniformly random permutation (Fisher-Yates) from a seed.
  static Permutation random(std::size_t n, std::uint64_t seed);

  std::size_t size() const noexcept { return image_.size(); }
  std::size_t operator[](std::size_t i) const { return image_[i]; }
  const std::vector<std::size_t>& image() const noexcept { return image_; }

  Permutation inverse() const;

  /// (this o other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const;

  bool is_identity() const noexcept;
  std::size_t fixed_point_count() const noexcept;
  /// Number of non-fixed points (k in Pi(n, k)).
  std::size_t moved_count() const noexcept { return size() - fixed_point_count(); }
  /// Number of 2-cycles, |{u < v : tau(u) = v, tau(v) = u}|.
  std::size_t transposition_count() const noexcept;

  /// Dense 0/1 matrix with P(i, tau(i)) = 1.
  Matrix to_matrix() const;

  /// Returns P B P^T without forming P.
  Matrix conjugate(const Matrix& b) const;

  std::string to_string() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& l, const Permutation& r) { return l.image_ <=> r.image_; }

 private:
  std::vector<std::size_t> image_;
};

}  // namespace gmlab
