#pragma once

// Universal singular value thresholding: estimate an edge-probability (or
// mean edge-weight) matrix from one observed symmetric matrix.

#include "gmlab/common.hpp"

#include <span>
#include <variant>
#include <vector>

namespace gmlab {

struct ExplicitThreshold {
  double t = 0.0;
};

/// t = a * sqrt(n * r_hat).
struct ScaledThreshold {
  double a = 2.01;
  double r_hat = 1.0;
};

/// Keep the top singular values up to the profile-likelihood elbow, found
/// n_elbows times in succession on the tail of the scree.
struct ElbowThreshold {
  std::size_t n_elbows = 1;
};

using ThresholdRule = std::variant<ExplicitThreshold, ScaledThreshold, ElbowThreshold>;

struct UsvtOptions {
  ThresholdRule rule = ScaledThreshold{};
  bool clip_to_unit = true;
  bool hollow_output = true;

  /// Throws ValidationError on out-of-range rule parameters.
  void validate() const;
};

struct UsvtEstimate {
  Matrix q_hat;
  std::size_t retained_rank = 0;
  std::vector<double> singular_values;  // descending
  double threshold_used = 0.0;
};

double scaled_threshold(std::size_t n, double r_hat, double a);

/// Zhu-Ghodsi elbow on a descending scree, pooled variance across the two
/// segments. Returns the number of leading values kept, in [1, size].
std::size_t elbow_rank(std::span<const double> singular_values, std::size_t n_elbows = 1);

/// Profile log-likelihood of splitting the scree after the first q values
/// (1 <= q <= size). A zero pooled variance scores +infinity.
double elbow_profile_loglik(std::span<const double> singular_values, std::size_t q);

UsvtEstimate usvt_estimate(const Matrix& a, const UsvtOptions& opts);

/// Entrywise clamp to [0, 1].
Matrix clip_unit(const Matrix& m);

/// a - q_hat.
Matrix center(const Matrix& a, const Matrix& q_hat);

}  // namespace gmlab
