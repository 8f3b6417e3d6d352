#include "gmlab/faq.hpp"

#include "gmlab/assignment.hpp"
#include "gmlab/parallel.hpp"
#include "gmlab/rng.hpp"

#include <cmath>
#include <optional>

namespace gmlab {

namespace {

void check_inputs(const Matrix& a, const Matrix& b, const char* what) {
  require_square(a, what);
  require_same_shape(a, b, what);
  if (!all_finite(a) || !all_finite(b)) {
    throw NumericError(std::string(what) + ": non-finite entry");
  }
}

// sum_i m(i, tau(i)) = <m, Q>.
double permutation_inner(const Matrix& m, const Permutation& q) {
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    total += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q[i]));
  }
  return total;
}

// tr(A Q B Q^T) = sum_{u,v} A(u,v) B(tau(u), tau(v)).
double permuted_trace(const Matrix& a, const Matrix& b, const Permutation& q) {
  const auto n = a.rows();
  double total = 0.0;
  for (Eigen::Index v = 0; v < n; ++v) {
    const auto tv = static_cast<Eigen::Index>(q[v]);
    for (Eigen::Index u = 0; u < n; ++u) {
      total += a(u, v) * b(static_cast<Eigen::Index>(q[u]), tv);
    }
  }
  return total;
}

struct StepCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
};

// Coefficients of g(d + alpha (Q - d)) - g(d), given adb = a d b.
StepCoefficients step_coefficients(const Matrix& a, const Matrix& b, const Matrix& d, const Matrix& adb,
                                   const Permutation& q) {
  const double adb_q = permutation_inner(adb, q);
  const double adb_d = (adb.array() * d.array()).sum();
  const double aqbq = permuted_trace(a, b, q);
  // Both coefficients are differences of nearly equal traces when q is close
  // to d; anything at rounding level is an exact zero (q == d gives R = 0).
  const double noise = 1e-12 * (std::abs(adb_q) + std::abs(adb_d) + std::abs(aqbq));
  auto snap = [noise](double x) { return std::abs(x) <= noise ? 0.0 : x; };
  return {snap(-2.0 * (adb_q - adb_d)), snap(-(aqbq - 2.0 * adb_q + adb_d))};
}

bool better(const MatchResult& lhs, const MatchResult& rhs) {
  const double tol = 1e-9 * std::max(1.0, std::abs(rhs.objective));
  if (lhs.objective < rhs.objective - tol) return true;
  if (lhs.objective > rhs.objective + tol) return false;
  return lhs.iterations < rhs.iterations;
}

}  // namespace

DoublyStochastic::DoublyStochastic(Matrix entries) : m_(std::move(entries)) {
  require_square(m_, "DoublyStochastic");
  if (!all_finite(m_)) {
    throw NumericError("DoublyStochastic: non-finite entry");
  }
  if (m_.size() > 0 && m_.minCoeff() < -kNegativeSlack) {
    throw ValidationError("DoublyStochastic: negative entry " + std::to_string(m_.minCoeff()));
  }
  m_ = m_.cwiseMax(0.0);
  const auto n = m_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(m_.row(i).sum() - 1.0) > kSumTolerance || std::abs(m_.col(i).sum() - 1.0) > kSumTolerance) {
      throw ValidationError("DoublyStochastic: row or column " + std::to_string(i) + " does not sum to 1");
    }
  }
}

DoublyStochastic DoublyStochastic::barycenter(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return DoublyStochastic(Matrix::Constant(m, m, n ? 1.0 / static_cast<double>(n) : 0.0), Unchecked{});
}

DoublyStochastic DoublyStochastic::from_permutation(const Permutation& p) {
  return DoublyStochastic(p.to_matrix(), Unchecked{});
}

DoublyStochastic DoublyStochastic::random_interior(std::size_t n, std::uint64_t seed) {
  Matrix m = 0.5 * barycenter(n).matrix() + 0.5 * Permutation::random(n, seed).to_matrix();
  return DoublyStochastic(std::move(m), Unchecked{});
}

std::string init_label(const MatchInit& init) {
  if (const auto* p = std::get_if<InitPermutation>(&init)) {
    return p->p.is_identity() ? "identity" : "permutation";
  }
  if (std::holds_alternative<InitBarycenter>(init)) {
    return "barycenter";
  }
  return "random:" + std::to_string(std::get<InitRandom>(init).seed);
}

void MatchOptions::validate() const {
  if (max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be > 0");
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
}

GmObjective gm_objective(const Matrix& a, const Matrix& b, const Permutation& p) {
  require_square(a, "gm_objective");
  require_same_shape(a, b, "gm_objective");
  if (p.size() != static_cast<std::size_t>(a.rows())) {
    throw DimensionError("gm_objective: permutation size differs from matrix size");
  }
  const double trace = permuted_trace(a, b, p);
  const double frob = (a - p.conjugate(b)).squaredNorm();
  return {frob, -trace};
}

double relaxed_objective(const Matrix& a, const Matrix& b, const Matrix& d) {
  return -(a * d * b).cwiseProduct(d).sum();
}

Matrix relaxed_gradient(const Matrix& a, const Matrix& b, const DoublyStochastic& d) {
  require_same_shape(a, b, "relaxed_gradient");
  require_same_shape(a, d.matrix(), "relaxed_gradient");
  return -2.0 * (a * d.matrix() * b);
}

double quadratic_step(double c1, double c2) noexcept {
  if (c2 > 0.0) {
    return std::clamp(-c1 / (2.0 * c2), 0.0, 1.0);
  }
  if (c2 == 0.0) {
    return c1 < 0.0 ? 1.0 : 0.0;
  }
  // Concave: the minimum over [0, 1] sits at an endpoint.
  return c1 + c2 < 0.0 ? 1.0 : 0.0;
}

double exact_line_search(const Matrix& a, const Matrix& b, const DoublyStochastic& d, const Permutation& q) {
  require_same_shape(a, b, "exact_line_search");
  require_same_shape(a, d.matrix(), "exact_line_search");
  if (q.size() != d.size()) {
    throw DimensionError("exact_line_search: permutation size differs");
  }
  const Matrix adb = a * d.matrix() * b;
  const StepCoefficients c = step_coefficients(a, b, d.matrix(), adb, q);
  return quadratic_step(c.c1, c.c2);
}

MatchResult faq_run(const Matrix& a, const Matrix& b, const DoublyStochastic& start, std::string label,
                    std::size_t max_iters, double rel_tol, const IterateObserver& observer) {
  check_inputs(a, b, "faq_run");
  if (start.size() != static_cast<std::size_t>(a.rows())) {
    throw DimensionError("faq_run: start size differs from graph size");
  }
  MatchResult result;
  result.init_label = std::move(label);
  Matrix d = start.matrix();
  if (observer) observer(0, d);
  Matrix adb(a.rows(), a.cols());
  double g = 0.0;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    adb.noalias() = a * d * b;
    if (iter == 0) {
      g = -(adb.cwiseProduct(d)).sum();
      result.relaxed_trace.push_back(g);
    }
    // Direction: argmin_Q <grad, Q> = argmax_Q <a d b, Q>.
    const Permutation q = solve_lap_max(adb).permutation;
    const StepCoefficients c = step_coefficients(a, b, d, adb, q);
    const double alpha = quadratic_step(c.c1, c.c2);
    const double g_new = g + alpha * c.c1 + alpha * alpha * c.c2;
    result.steps.push_back(alpha);
    result.iterations = iter + 1;
    if (alpha == 0.0) {
      result.relaxed_trace.push_back(g);
      if (observer) observer(iter + 1, d);
      result.converged = true;
      break;
    }
    d *= (1.0 - alpha);
    for (std::size_t i = 0; i < q.size(); ++i) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q[i])) += alpha;
    }
    result.relaxed_trace.push_back(g_new);
    if (observer) observer(iter + 1, d);
    const double decrease = (g - g_new) / std::max(std::abs(g), 1e-12);
    g = g_new;
    if (decrease < rel_tol) {
      result.converged = true;
      break;
    }
  }
  result.permutation = solve_lap_max(d).permutation;
  const GmObjective obj = gm_objective(a, b, result.permutation);
  result.objective = obj.frobenius_sq;
  result.trace_objective = obj.trace_form;
  return result;
}

MatchResult faq_match(const Matrix& a, const Matrix& b, const MatchOptions& opts) {
  opts.validate();
  check_inputs(a, b, "faq_match");
  const auto n = static_cast<std::size_t>(a.rows());
  if (const auto* p = std::get_if<InitPermutation>(&opts.init); p && p->p.size() != n) {
    throw ValidationError("faq_match: init permutation has size " + std::to_string(p->p.size()) +
                          ", graphs have " + std::to_string(n));
  }

  std::vector<std::optional<MatchResult>> runs(opts.restarts);
  parallel_for(opts.restarts, opts.threads, [&](std::size_t k) {
    if (k == 0) {
      const DoublyStochastic start = std::visit(
          [n](const auto& init) {
            using T = std::decay_t<decltype(init)>;
            if constexpr (std::is_same_v<T, InitPermutation>) {
              return DoublyStochastic::from_permutation(init.p);
            } else if constexpr (std::is_same_v<T, InitBarycenter>) {
              return DoublyStochastic::barycenter(n);
            } else {
              return DoublyStochastic::random_interior(n, init.seed);
            }
          },
          opts.init);
      runs[k] = faq_run(a, b, start, init_label(opts.init), opts.max_iters, opts.rel_tol);
    } else {
      const std::uint64_t seed = derive_seed(opts.restart_seed, {k});
      runs[k] = faq_run(a, b, DoublyStochastic::random_interior(n, seed), "random:" + std::to_string(seed),
                        opts.max_iters, opts.rel_tol);
    }
  });

  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (better(*runs[k], *runs[best])) best = k;
  }
  return std::move(*runs[best]);
}

}  // namespace gmlab
