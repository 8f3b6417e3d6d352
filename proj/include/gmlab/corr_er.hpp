#pragma once

// Correlated heterogeneous Erdos-Renyi pairs: (A, B) with independent edges,
// E A = Q1, E B = Q2 off the diagonal, and entrywise edge correlation R.

#include "gmlab/common.hpp"
#include "gmlab/permutation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gmlab {

/// Absolute slack on every feasibility comparison. Boundary parameters such
/// as marginals (0.8, 0.2) with correlation 0.25 must be accepted.
inline constexpr double kFeasibilitySlack = 1e-12;

/// Model triple (Q1, Q2, R) plus the core size. Vertices [0, n_core) are
/// core; the rest are junk and carry zero correlation. Diagonals of q1, q2
/// and r are accepted but never used.
struct CorrSpec {
  Matrix q1;
  Matrix q2;
  Matrix r;
  std::size_t n_core = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(q1.rows()); }
};

struct Violation {
  std::size_t u = 0;
  std::size_t v = 0;
  std::string bound;
  double value = 0.0;
  double limit = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Shape problems that prevent entrywise checks (empty when shapes agree).
  std::vector<std::string> structural;

  bool ok() const noexcept { return violations.empty() && structural.empty(); }
  std::string to_string(std::size_t max_items = 10) const;
};

/// Two loop-free graphs on the same vertex set, aligned by the identity.
struct GraphPair {
  Matrix a;
  Matrix b;
  std::size_t n_core = 0;
  bool weighted = false;

  std::size_t size() const noexcept { return static_cast<std::size_t>(a.rows()); }
};

struct BiBernParams {
  double z0 = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
};

/// Largest correlation a bivariate Bernoulli with marginals (p, q) admits:
/// sqrt(min(p,q)(1-max(p,q)) / (max(p,q)(1-min(p,q)))), and 0 when either
/// marginal is degenerate.
double max_feasible_correlation(double p, double q) noexcept;

/// rho * sqrt(p(1-p) q(1-q)).
double edge_covariance(double p, double q, double rho) noexcept;

ValidationReport validate_spec(const CorrSpec& spec);

/// Throws ValidationError carrying the report text unless the spec is valid.
void require_valid(const CorrSpec& spec);

/// Parameters of the independent triple (Z0, Z1, Z2) realising
/// (X, Y) = (Z0, Z0 Z2 + (1 - Z0) Z1). Throws FeasibilityError when
/// (p, q, rho) lies outside the feasible region.
BiBernParams bibern_params(double p, double q, double rho);

/// Row u draws from its own substream derive_seed(seed, {u}); each pair
/// (u, v), v > u, consumes exactly three uniforms in increasing v.
GraphPair sample_pair(const CorrSpec& spec, std::uint64_t seed);

/// Expands block constants. Vertex i belongs to block labels[i].
CorrSpec labeled_sbm_spec(const std::vector<std::size_t>& labels, const Matrix& q1_blocks,
                          const Matrix& q2_blocks, const Matrix& r_blocks,
                          std::optional<std::size_t> n_core = std::nullopt);

/// Contiguous blocks of the given sizes. n_core defaults to n.
CorrSpec sbm_spec(const std::vector<std::size_t>& block_sizes, const Matrix& q1_blocks,
                  const Matrix& q2_blocks, const Matrix& r_blocks,
                  std::optional<std::size_t> n_core = std::nullopt);

/// Single block with constants (p, q, rho).
CorrSpec homogeneous_spec(std::size_t n, double p, double q, double rho);

/// Two-block heterogeneous spec with swapped dense blocks: Q1 = [[0.8,0.1],[0.1,0.2]],
/// Q2 = [[0.2,0.1],[0.1,0.8]], R = alpha [[0.25,0.3],[0.3,0.25]], n per block.
CorrSpec swapped_block_spec(std::size_t n_per_block, double alpha);

/// Copy of q with a zero diagonal: the expectation of a loop-free graph.
Matrix hollow(const Matrix& q);

/// Off-diagonal covariance matrix Cov(A(u,v), B(u,v)); zero diagonal.
Matrix covariance_matrix(const CorrSpec& spec);

/// (1/2) E tr(A P B P^T), computed exactly as a sum over unordered pairs.
double expected_trace(const CorrSpec& spec, const Permutation& p);

}  // namespace gmlab

namespace gmlab {

/// Sets r to zero on every pair touching a junk vertex (index >= n_core)
/// and records n_core. Validates the result.
CorrSpec with_core(CorrSpec spec, std::size_t n_core);

}  // namespace gmlab
