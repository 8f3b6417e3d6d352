#include "gmlab/permutation.hpp"

#include "gmlab/rng.hpp"

#include <numeric>
#include <sstream>

namespace gmlab {

Permutation::Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (std::size_t i = 0; i < image_.size(); ++i) {
    const std::size_t j = image_[i];
    if (j >= image_.size() || seen[j]) {
      throw ValidationError("permutation image is not a bijection at position " + std::to_string(i));
    }
    seen[j] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  return Permutation(std::move(image));
}

Permutation Permutation::block_swap(std::size_t n) {
  if (n % 2 != 0) {
    throw ValidationError("block swap needs an even vertex count, got " + std::to_string(n));
  }
  const std::size_t half = n / 2;
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) {
    image[i] = i < half ? i + half : i - half;
  }
  return Permutation(std::move(image));
}

Permutation Permutation::random(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  Substream rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(image[i - 1], image[j]);
  }
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(size());
  for (std::size_t i = 0; i < size(); ++i) {
    inv[image_[i]] = i;
  }
  return Permutation(std::move(inv));
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) {
    throw DimensionError("compose: permutation sizes differ");
  }
  std::vector<std::size_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    out[i] = image_[other.image_[i]];
  }
  return Permutation(std::move(out));
}

bool Permutation::is_identity() const noexcept { return fixed_point_count() == size(); }

std::size_t Permutation::fixed_point_count() const noexcept {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    count += image_[i] == i ? 1 : 0;
  }
  return count;
}

std::size_t Permutation::transposition_count() const noexcept {
  std::size_t count = 0;
  for (std::size_t u = 0; u < size(); ++u) {
    const std::size_t v = image_[u];
    if (v > u && image_[v] == u) {
      ++count;
    }
  }
  return count;
}

Matrix Permutation::to_matrix() const {
  const auto n = static_cast<Eigen::Index>(size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i, static_cast<Eigen::Index>(image_[i])) = 1.0;
  }
  return p;
}

Matrix Permutation::conjugate(const Matrix& b) const {
  require_square(b, "conjugate");
  if (static_cast<std::size_t>(b.rows()) != size()) {
    throw DimensionError("conjugate: permutation and matrix sizes differ");
  }
  const auto n = static_cast<Eigen::Index>(size());
  Matrix out(n, n);
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto tv = static_cast<Eigen::Index>(image_[v]);
    for (Eigen::Index u = 0; u < n; ++u) {
      out(u, v) = b(static_cast<Eigen::Index>(image_[u]), tv);
    }
  }
  return out;
}

std::string Permutation::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < size(); ++i) {
    os << (i ? " " : "") << image_[i];
  }
  os << ')';
  return os.str();
}

}  // namespace gmlab
