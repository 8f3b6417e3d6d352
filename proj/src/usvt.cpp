#include "gmlab/usvt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gmlab {

void UsvtOptions::validate() const {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ExplicitThreshold>) {
          if (!(r.t > 0.0)) throw ValidationError("explicit threshold must be > 0");
        } else if constexpr (std::is_same_v<T, ScaledThreshold>) {
          if (!(r.a > 0.0)) throw ValidationError("threshold scale a must be > 0");
          if (!(r.r_hat > 0.0 && r.r_hat <= 1.0)) throw ValidationError("r_hat must lie in (0, 1]");
        } else {
          if (r.n_elbows < 1) throw ValidationError("n_elbows must be >= 1");
        }
      },
      rule);
}

double scaled_threshold(std::size_t n, double r_hat, double a) {
  return a * std::sqrt(static_cast<double>(n) * r_hat);
}

double elbow_profile_loglik(std::span<const double> d, std::size_t q) {
  const std::size_t p = d.size();
  if (q < 1 || q > p) {
    throw ValidationError("elbow split position out of range");
  }
  auto mean = [](std::span<const double> s) {
    return s.empty() ? 0.0 : std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  };
  const auto head = d.first(q);
  const auto tail = d.subspan(q);
  const double mu1 = mean(head);
  const double mu2 = mean(tail);
  double ss = 0.0;
  for (double x : head) ss += (x - mu1) * (x - mu1);
  for (double x : tail) ss += (x - mu2) * (x - mu2);
  const std::size_t dof = tail.empty() ? p - 1 : p - 2;
  const double var = dof > 0 ? ss / static_cast<double>(dof) : 0.0;
  if (!(var > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return -0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi * var) - ss / (2.0 * var);
}

std::size_t elbow_rank(std::span<const double> singular_values, std::size_t n_elbows) {
  if (singular_values.empty()) {
    throw ValidationError("elbow_rank needs a nonempty scree");
  }
  std::size_t cut = 0;
  for (std::size_t e = 0; e < std::max<std::size_t>(n_elbows, 1); ++e) {
    const auto tail = singular_values.subspan(cut);
    if (tail.size() <= 1) {
      cut += tail.size();
      break;
    }
    std::size_t best = 1;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t q = 1; q <= tail.size(); ++q) {
      const double ll = elbow_profile_loglik(tail, q);
      if (ll > best_ll) {
        best_ll = ll;
        best = q;
      }
    }
    cut += best;
    if (cut >= singular_values.size()) {
      break;
    }
  }
  return std::clamp<std::size_t>(cut, 1, singular_values.size());
}

Matrix clip_unit(const Matrix& m) { return m.cwiseMax(0.0).cwiseMin(1.0); }

Matrix center(const Matrix& a, const Matrix& q_hat) {
  require_same_shape(a, q_hat, "center");
  return a - q_hat;
}

UsvtEstimate usvt_estimate(const Matrix& a, const UsvtOptions& opts) {
  opts.validate();
  require_square(a, "usvt_estimate");
  if (!all_finite(a)) {
    throw NumericError("usvt_estimate: non-finite input");
  }
  const auto n = a.rows();
  UsvtEstimate est;
  est.q_hat = Matrix::Zero(n, n);
  if (n == 0) {
    return est;
  }

  // Symmetric input: singular triples are (|lambda_i|, v_i, sign(lambda_i) v_i).
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw NumericError("usvt_estimate: eigendecomposition failed");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto& lambda = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::abs(lambda(i)) > std::abs(lambda(j));
  });
  est.singular_values.reserve(order.size());
  for (Eigen::Index i : order) {
    est.singular_values.push_back(std::abs(lambda(i)));
  }

  std::size_t keep = 0;
  if (const auto* elbow = std::get_if<ElbowThreshold>(&opts.rule)) {
    keep = elbow_rank(est.singular_values, elbow->n_elbows);
    est.threshold_used = keep < est.singular_values.size() ? est.singular_values[keep] : 0.0;
  } else {
    const double t = std::holds_alternative<ExplicitThreshold>(opts.rule)
                         ? std::get<ExplicitThreshold>(opts.rule).t
                         : scaled_threshold(static_cast<std::size_t>(n), std::get<ScaledThreshold>(opts.rule).r_hat,
                                            std::get<ScaledThreshold>(opts.rule).a);
    est.threshold_used = t;
    while (keep < est.singular_values.size() && est.singular_values[keep] > t) {
      ++keep;
    }
  }
  est.retained_rank = keep;

  Matrix truncated = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < keep; ++k) {
    const Eigen::Index i = order[k];
    const auto v = eig.eigenvectors().col(i);
    truncated.noalias() += lambda(i) * v * v.transpose();
  }
  truncated = 0.5 * (truncated + truncated.transpose()).eval();
  if (opts.clip_to_unit) {
    truncated = clip_unit(truncated);
  }
  if (opts.hollow_output) {
    truncated.diagonal().setZero();
  }
  est.q_hat = std::move(truncated);
  return est;
}

}  // namespace gmlab
