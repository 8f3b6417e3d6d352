#pragma once

// Exact small-n graph matching, matchability predicates, and the
// combinatorial / covariance diagnostics behind the centering results.

#include "gmlab/common.hpp"
#include "gmlab/corr_er.hpp"
#include "gmlab/permutation.hpp"
#include "gmlab/usvt.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gmlab {

inline constexpr std::size_t kBruteForceGmpMaxN = 8;
inline constexpr double kGmpTieTolerance = 1e-9;

struct GmpArgmin {
  std::vector<Permutation> argmin;  // lexicographic order
  double objective = 0.0;           // ||a - P b P^T||_F^2 shared by every member
};

/// Every permutation minimising ||a - P b P^T||_F^2, ties within 1e-9. n <= 8.
GmpArgmin brute_force_gmp(const Matrix& a, const Matrix& b);

/// The argmin is exactly {identity}.
struct ExactFlavor {};
/// Every optimal permutation moves at most max_moved labels.
struct MovedBudgetFlavor {
  std::size_t max_moved = 0;
};
/// Every optimal permutation fixes [0, n_core) pointwise.
struct CoreFlavor {
  std::size_t n_core = 0;
};
using MatchabilityFlavor = std::variant<ExactFlavor, MovedBudgetFlavor, CoreFlavor>;

bool satisfies(const std::vector<Permutation>& argmin, const MatchabilityFlavor& flavor);
bool is_matchable(const Matrix& a, const Matrix& b, const MatchabilityFlavor& flavor);

enum class Dissimilarity { kGmp, kOracleCentered, kUsvtCentered };
std::string to_string(Dissimilarity d);

struct PredicateVerdict {
  Dissimilarity dissimilarity = Dissimilarity::kGmp;
  GmpArgmin argmin;
  bool exact = false;
  bool moved_budget = false;
  bool core = false;
};

struct MatchabilityVerdict {
  std::size_t budget = 0;  // allowed number of moved labels
  std::size_t n_core = 0;
  std::vector<PredicateVerdict> predicates;
};

/// Runs the three dissimilarities (raw, minus hollow E, minus USVT
/// estimates) through brute_force_gmp and every flavor.
MatchabilityVerdict assess_matchability(const GraphPair& pair, const CorrSpec& spec, const UsvtOptions& usvt,
                                        std::size_t budget);

/// Pairs {u, v} with {tau(u), tau(v)} != {u, v}: |E_P| by enumeration.
/// Throws std::logic_error if it disagrees with the closed form.
std::size_t moved_pair_count(const Permutation& p);

/// C(k, 2) - T + (n - k) k.
std::size_t moved_pair_count_formula(std::size_t n, std::size_t k, std::size_t transpositions);

/// k (n - 1 - k/2).
double moved_pair_lower_bound(std::size_t n, std::size_t k);

/// Expected centred-objective gap between identity and p: the covariance
/// summed over the pairs moved by p.
double x_p(const CorrSpec& spec, const Permutation& p);

/// (1/2) eps k (n - 1 - k/2), eps the minimum off-diagonal covariance.
double epsilon_bound(const CorrSpec& spec, std::size_t k);

/// x_p / (k sqrt(n log n)), reported as a diagnostic only.
double growth_ratio(const CorrSpec& spec, const Permutation& p);

std::uint64_t derangements(std::size_t k);
std::uint64_t binomial(std::size_t n, std::size_t k);
/// |Pi(n, k)| = C(n, k) D_k.
std::uint64_t count_pi_n_k(std::size_t n, std::size_t k);

/// Core-fixing reduction: core indices map to themselves, and each junk
/// index i maps to tau^m(i) for the least m >= 1 landing in the junk set.
Permutation tau_id(const Permutation& tau, std::size_t n_core);

/// Fraction of i with p(i) == truth(i), over [0, core) when core is given.
double accuracy(const Permutation& p, const Permutation& truth, std::optional<std::size_t> core = std::nullopt);

struct ConcentrationSample {
  std::uint64_t seed = 0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  double bound_a = 0.0;  // 2 sqrt(max q1) n
  double bound_b = 0.0;
  bool holds = false;
};

struct ConcentrationReport {
  std::vector<ConcentrationSample> samples;
  std::size_t holds_count() const noexcept;
};

/// Samples a pair per seed, centres by the hollow expectations and checks
/// ||A~||_F < 2 sqrt(r1) n and ||B~||_F < 2 sqrt(r2) n.
ConcentrationReport frobenius_concentration_check(const CorrSpec& spec, const std::vector<std::uint64_t>& seeds);

}  // namespace gmlab
