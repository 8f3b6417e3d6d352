#include "gmlab/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace gmlab {

namespace {

// Minimum-cost assignment over the rows/columns selected by row_ids and
// col_ids (same length). Returns col index (into col_ids) per row index.
std::vector<std::size_t> hungarian_min(const Matrix& cost, const std::vector<Eigen::Index>& row_ids,
                                       const std::vector<Eigen::Index>& col_ids) {
  const std::size_t n = row_ids.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      const Eigen::Index r = row_ids[i0 - 1];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(r, col_ids[j - 1]) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assign(n);
  for (std::size_t j = 1; j <= n; ++j) {
    assign[p[j] - 1] = j - 1;
  }
  return assign;
}

double assignment_score(const Matrix& score, const std::vector<std::size_t>& image) {
  double total = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    total += score(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(image[i]));
  }
  return total;
}

double tie_tolerance(double value) { return 1e-9 * std::max(1.0, std::abs(value)); }

void require_finite_square(const Matrix& score, const char* what) {
  require_square(score, what);
  if (!all_finite(score)) {
    throw NumericError(std::string(what) + ": non-finite score entry");
  }
}

// Among optimal assignments, pick the lexicographically smallest image by
// fixing rows in order and keeping the first column that still allows the
// optimum.
std::vector<std::size_t> lexicographic_optimum(const Matrix& score, double optimum) {
  const auto n = score.rows();
  const Matrix cost = -score;
  const double tol = tie_tolerance(optimum);
  std::vector<std::size_t> image(static_cast<std::size_t>(n));
  std::vector<char> col_used(static_cast<std::size_t>(n), 0);
  double fixed = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = i + 1; r < n; ++r) rows.push_back(r);
    bool placed = false;
    for (Eigen::Index j = 0; j < n && !placed; ++j) {
      if (col_used[j]) continue;
      std::vector<Eigen::Index> cols;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (!col_used[c] && c != j) cols.push_back(c);
      }
      double rest = 0.0;
      if (!rows.empty()) {
        const auto sub = hungarian_min(cost, rows, cols);
        for (std::size_t k = 0; k < rows.size(); ++k) rest += score(rows[k], cols[sub[k]]);
      }
      if (fixed + score(i, j) + rest >= optimum - tol) {
        image[i] = static_cast<std::size_t>(j);
        col_used[j] = 1;
        fixed += score(i, j);
        placed = true;
      }
    }
    if (!placed) {
      throw NumericError("solve_lap_max: tie-break scan lost the optimum");
    }
  }
  return image;
}

}  // namespace

Assignment solve_lap_max(const Matrix& score) {
  require_finite_square(score, "solve_lap_max");
  const auto n = score.rows();
  if (n == 0) {
    return {Permutation::identity(0), 0.0};
  }
  std::vector<Eigen::Index> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), Eigen::Index{0});
  std::vector<std::size_t> image = hungarian_min(-score, ids, ids);
  double value = assignment_score(score, image);
  if (static_cast<std::size_t>(n) <= kLexTieBreakMaxN) {
    image = lexicographic_optimum(score, value);
    value = assignment_score(score, image);
  }
  return {Permutation(std::move(image)), value};
}

Assignment brute_force_lap(const Matrix& score) {
  require_finite_square(score, "brute_force_lap");
  const auto n = static_cast<std::size_t>(score.rows());
  if (n > kLexTieBreakMaxN) {
    throw SizeError("brute_force_lap supports n <= 9, got " + std::to_string(n));
  }
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  std::vector<std::size_t> best = image;
  double best_value = assignment_score(score, image);
  // next_permutation walks images in lexicographic order, so keeping only
  // strict improvements retains the smallest optimal image.
  while (std::next_permutation(image.begin(), image.end())) {
    const double value = assignment_score(score, image);
    if (value > best_value + tie_tolerance(best_value)) {
      best_value = value;
      best = image;
    }
  }
  return {Permutation(std::move(best)), best_value};
}

}  // namespace gmlab
