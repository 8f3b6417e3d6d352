#pragma once

// Frank-Wolfe relaxation of graph matching over the doubly stochastic
// polytope, minimising g(D) = -tr(A D B D^T) and rounding the final iterate
// to a permutation with a linear assignment.

#include "gmlab/common.hpp"
#include "gmlab/permutation.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace gmlab {

/// Nonnegative square matrix with unit row and column sums (within 1e-8).
class DoublyStochastic {
 public:
  static constexpr double kSumTolerance = 1e-8;
  static constexpr double kNegativeSlack = 1e-12;

  /// Validates; entries in [-1e-12, 0) are clamped to 0.
  explicit DoublyStochastic(Matrix entries);

  static DoublyStochastic barycenter(std::size_t n);
  static DoublyStochastic from_permutation(const Permutation& p);
  /// 0.5 * barycenter + 0.5 * (uniformly random permutation from seed).
  static DoublyStochastic random_interior(std::size_t n, std::uint64_t seed);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  struct Unchecked {};
  DoublyStochastic(Matrix entries, Unchecked) : m_(std::move(entries)) {}

  Matrix m_;
};

struct InitPermutation {
  Permutation p;
};
struct InitBarycenter {};
struct InitRandom {
  std::uint64_t seed = 0;
};
using MatchInit = std::variant<InitPermutation, InitBarycenter, InitRandom>;

std::string init_label(const MatchInit& init);

struct MatchOptions {
  std::size_t max_iters = 30;
  double rel_tol = 1e-6;
  MatchInit init = InitBarycenter{};
  /// Total number of runs. Run 0 starts from init; run k >= 1 starts from
  /// DoublyStochastic::random_interior(n, derive_seed(restart_seed, {k})).
  std::size_t restarts = 1;
  std::uint64_t restart_seed = 0;
  /// Worker threads for restarts; results do not depend on it.
  std::size_t threads = 1;

  void validate() const;
};

struct MatchResult {
  Permutation permutation;
  double objective = 0.0;        // ||A - P B P^T||_F^2
  double trace_objective = 0.0;  // -tr(A P B P^T)
  std::size_t iterations = 0;
  bool converged = false;
  std::string init_label;
  /// g(D_k) for k = 0..iterations.
  std::vector<double> relaxed_trace;
  /// Line-search step taken at each iteration.
  std::vector<double> steps;
};

struct GmObjective {
  double frobenius_sq = 0.0;
  double trace_form = 0.0;
};

GmObjective gm_objective(const Matrix& a, const Matrix& b, const Permutation& p);

/// g(D) = -tr(A D B D^T).
double relaxed_objective(const Matrix& a, const Matrix& b, const Matrix& d);

/// Gradient of g for symmetric a, b: -2 a d b.
Matrix relaxed_gradient(const Matrix& a, const Matrix& b, const DoublyStochastic& d);

/// Minimiser over [0, 1] of g((1 - alpha) d + alpha q).
double exact_line_search(const Matrix& a, const Matrix& b, const DoublyStochastic& d, const Permutation& q);

/// Closed-form minimiser of c1 * alpha + c2 * alpha^2 on [0, 1].
double quadratic_step(double c1, double c2) noexcept;

/// Called with (k, D_k) for every iterate, including the start.
using IterateObserver = std::function<void(std::size_t, const Matrix&)>;

/// One Frank-Wolfe run from a given starting point.
MatchResult faq_run(const Matrix& a, const Matrix& b, const DoublyStochastic& start, std::string label,
                    std::size_t max_iters, double rel_tol, const IterateObserver& observer = {});

MatchResult faq_match(const Matrix& a, const Matrix& b, const MatchOptions& opts);

}  // namespace gmlab
