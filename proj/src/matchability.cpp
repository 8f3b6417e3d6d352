#include "gmlab/matchability.hpp"

#include "gmlab/faq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gmlab {

GmpArgmin brute_force_gmp(const Matrix& a, const Matrix& b) {
  require_square(a, "brute_force_gmp");
  require_same_shape(a, b, "brute_force_gmp");
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > kBruteForceGmpMaxN) {
    throw SizeError("brute_force_gmp supports n <= 8, got " + std::to_string(n));
  }
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  GmpArgmin out;
  out.objective = std::numeric_limits<double>::infinity();
  const auto m = static_cast<Eigen::Index>(n);
  do {
    double obj = 0.0;
    for (Eigen::Index u = 0; u < m; ++u) {
      for (Eigen::Index v = 0; v < m; ++v) {
        const double diff = a(u, v) - b(static_cast<Eigen::Index>(image[u]), static_cast<Eigen::Index>(image[v]));
        obj += diff * diff;
      }
    }
    if (obj < out.objective - kGmpTieTolerance) {
      out.objective = obj;
      out.argmin.clear();
      out.argmin.emplace_back(image);
    } else if (obj <= out.objective + kGmpTieTolerance) {
      out.argmin.emplace_back(image);
    }
  } while (std::next_permutation(image.begin(), image.end()));
  return out;
}

bool satisfies(const std::vector<Permutation>& argmin, const MatchabilityFlavor& flavor) {
  return std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExactFlavor>) {
          return argmin.size() == 1 && argmin.front().is_identity();
        } else if constexpr (std::is_same_v<T, MovedBudgetFlavor>) {
          return std::all_of(argmin.begin(), argmin.end(),
                             [&](const Permutation& p) { return p.moved_count() <= f.max_moved; });
        } else {
          return std::all_of(argmin.begin(), argmin.end(), [&](const Permutation& p) {
            for (std::size_t i = 0; i < std::min(f.n_core, p.size()); ++i) {
              if (p[i] != i) return false;
            }
            return true;
          });
        }
      },
      flavor);
}

bool is_matchable(const Matrix& a, const Matrix& b, const MatchabilityFlavor& flavor) {
  return satisfies(brute_force_gmp(a, b).argmin, flavor);
}

std::string to_string(Dissimilarity d) {
  switch (d) {
    case Dissimilarity::kGmp:
      return "gmp";
    case Dissimilarity::kOracleCentered:
      return "oracle";
    case Dissimilarity::kUsvtCentered:
      return "usvt";
  }
  return "unknown";
}

MatchabilityVerdict assess_matchability(const GraphPair& pair, const CorrSpec& spec, const UsvtOptions& usvt,
                                        std::size_t budget) {
  require_same_shape(pair.a, spec.q1, "assess_matchability");
  MatchabilityVerdict verdict;
  verdict.budget = budget;
  verdict.n_core = spec.n_core;
  const Matrix a_usvt = center(pair.a, usvt_estimate(pair.a, usvt).q_hat);
  const Matrix b_usvt = center(pair.b, usvt_estimate(pair.b, usvt).q_hat);
  const std::vector<std::tuple<Dissimilarity, Matrix, Matrix>> inputs = {
      {Dissimilarity::kGmp, pair.a, pair.b},
      {Dissimilarity::kOracleCentered, center(pair.a, hollow(spec.q1)), center(pair.b, hollow(spec.q2))},
      {Dissimilarity::kUsvtCentered, a_usvt, b_usvt},
  };
  for (const auto& [kind, a, b] : inputs) {
    PredicateVerdict pv;
    pv.dissimilarity = kind;
    pv.argmin = brute_force_gmp(a, b);
    pv.exact = satisfies(pv.argmin.argmin, ExactFlavor{});
    pv.moved_budget = satisfies(pv.argmin.argmin, MovedBudgetFlavor{budget});
    pv.core = satisfies(pv.argmin.argmin, CoreFlavor{spec.n_core});
    verdict.predicates.push_back(std::move(pv));
  }
  return verdict;
}

std::size_t moved_pair_count_formula(std::size_t n, std::size_t k, std::size_t transpositions) {
  const std::size_t pairs = k == 0 ? 0 : k * (k - 1) / 2;
  return pairs - transpositions + (n - k) * k;
}

double moved_pair_lower_bound(std::size_t n, std::size_t k) {
  const double kd = static_cast<double>(k);
  return kd * (static_cast<double>(n) - 1.0 - kd / 2.0);
}

std::size_t moved_pair_count(const Permutation& p) {
  const std::size_t n = p.size();
  std::size_t count = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const bool same = (p[u] == u && p[v] == v) || (p[u] == v && p[v] == u);
      count += same ? 0 : 1;
    }
  }
  const std::size_t formula = moved_pair_count_formula(n, p.moved_count(), p.transposition_count());
  if (formula != count) {
    throw std::logic_error("moved_pair_count: enumeration " + std::to_string(count) + " != closed form " +
                           std::to_string(formula));
  }
  return count;
}

double x_p(const CorrSpec& spec, const Permutation& p) {
  require_valid(spec);
  if (p.size() != spec.size()) {
    throw DimensionError("x_p: permutation size differs from spec size");
  }
  const std::size_t n = p.size();
  double total = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if ((p[u] == u && p[v] == v) || (p[u] == v && p[v] == u)) continue;
      const auto iu = static_cast<Eigen::Index>(u);
      const auto iv = static_cast<Eigen::Index>(v);
      total += edge_covariance(spec.q1(iu, iv), spec.q2(iu, iv), spec.r(iu, iv));
    }
  }
  return total;
}

double epsilon_bound(const CorrSpec& spec, std::size_t k) {
  require_valid(spec);
  const std::size_t n = spec.size();
  if (k < 2 || k > n) {
    throw ValidationError("epsilon_bound needs 2 <= k <= n");
  }
  const Matrix cov = covariance_matrix(spec);
  double eps = std::numeric_limits<double>::infinity();
  for (Eigen::Index u = 0; u < cov.rows(); ++u) {
    for (Eigen::Index v = u + 1; v < cov.cols(); ++v) {
      eps = std::min(eps, cov(u, v));
    }
  }
  return 0.5 * eps * moved_pair_lower_bound(n, k);
}

double growth_ratio(const CorrSpec& spec, const Permutation& p) {
  const double n = static_cast<double>(spec.size());
  const double k = static_cast<double>(p.moved_count());
  if (k == 0.0 || n < 2.0) return 0.0;
  return x_p(spec, p) / (k * std::sqrt(n * std::log(n)));
}

std::uint64_t derangements(std::size_t k) {
  std::uint64_t prev2 = 1;  // D_0
  std::uint64_t prev1 = 0;  // D_1
  if (k == 0) return prev2;
  for (std::size_t i = 2; i <= k; ++i) {
    const std::uint64_t cur = (i - 1) * (prev1 + prev2);
    prev2 = prev1;
    prev1 = cur;
  }
  return prev1;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    out = out * (n - k + i) / i;
  }
  return out;
}

std::uint64_t count_pi_n_k(std::size_t n, std::size_t k) {
  if (k > n) {
    throw ValidationError("count_pi_n_k needs k <= n");
  }
  return binomial(n, k) * derangements(k);
}

Permutation tau_id(const Permutation& tau, std::size_t n_core) {
  const std::size_t n = tau.size();
  if (n_core > n) {
    throw ValidationError("tau_id: n_core exceeds n");
  }
  std::vector<std::size_t> image(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_core) {
      image[i] = i;
      continue;
    }
    std::size_t j = tau[i];
    while (j < n_core) {
      j = tau[j];
    }
    image[i] = j;
  }
  return Permutation(std::move(image));
}

double accuracy(const Permutation& p, const Permutation& truth, std::optional<std::size_t> core) {
  if (p.size() != truth.size()) {
    throw DimensionError("accuracy: permutation sizes differ");
  }
  const std::size_t m = core.value_or(p.size());
  if (m > p.size()) {
    throw ValidationError("accuracy: core exceeds n");
  }
  if (m == 0) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < m; ++i) {
    hits += p[i] == truth[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(m);
}

std::size_t ConcentrationReport::holds_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const ConcentrationSample& s) { return s.holds; }));
}

ConcentrationReport frobenius_concentration_check(const CorrSpec& spec, const std::vector<std::uint64_t>& seeds) {
  require_valid(spec);
  const double n = static_cast<double>(spec.size());
  const Matrix ea = hollow(spec.q1);
  const Matrix eb = hollow(spec.q2);
  const double r1 = spec.size() > 1 ? ea.maxCoeff() : 0.0;
  const double r2 = spec.size() > 1 ? eb.maxCoeff() : 0.0;
  ConcentrationReport report;
  for (std::uint64_t seed : seeds) {
    const GraphPair pair = sample_pair(spec, seed);
    ConcentrationSample s;
    s.seed = seed;
    s.norm_a = (pair.a - ea).norm();
    s.norm_b = (pair.b - eb).norm();
    s.bound_a = 2.0 * std::sqrt(r1) * n;
    s.bound_b = 2.0 * std::sqrt(r2) * n;
    // A zero centred matrix satisfies the bound even when it is zero.
    const bool ok_a = s.norm_a < s.bound_a || s.norm_a == 0.0;
    const bool ok_b = s.norm_b < s.bound_b || s.norm_b == 0.0;
    s.holds = ok_a && ok_b;
    report.samples.push_back(s);
  }
  return report;
}

}  // namespace gmlab
