#include "gmlab/corr_er.hpp"

#include "gmlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gmlab {

namespace {

bool degenerate(double p) noexcept { return p <= 0.0 || p >= 1.0; }

double clamp_unit(double x) noexcept { return std::clamp(x, 0.0, 1.0); }

// Largest admissible covariance, min(p(1-q), q(1-p)).
double covariance_cap(double p, double q) noexcept { return std::min(p * (1.0 - q), q * (1.0 - p)); }

}  // namespace

std::string ValidationReport::to_string(std::size_t max_items) const {
  std::ostringstream os;
  for (const auto& s : structural) {
    os << s << '\n';
  }
  std::size_t shown = 0;
  for (const auto& v : violations) {
    if (shown++ == max_items) {
      os << "... " << (violations.size() - max_items) << " more\n";
      break;
    }
    os << "(" << v.u << "," << v.v << "): " << v.bound << " (value " << v.value << ", limit " << v.limit
       << ")\n";
  }
  return os.str();
}

double max_feasible_correlation(double p, double q) noexcept {
  if (degenerate(p) || degenerate(q)) {
    return 0.0;
  }
  const double hi = std::max(p, q);
  const double lo = std::min(p, q);
  return std::sqrt(lo * (1.0 - hi) / (hi * (1.0 - lo)));
}

double edge_covariance(double p, double q, double rho) noexcept {
  return rho * std::sqrt(p * (1.0 - p) * q * (1.0 - q));
}

ValidationReport validate_spec(const CorrSpec& spec) {
  ValidationReport report;
  const Matrix& q1 = spec.q1;
  if (q1.rows() != q1.cols()) {
    report.structural.push_back("q1 is not square");
    return report;
  }
  if (spec.q2.rows() != q1.rows() || spec.q2.cols() != q1.cols()) {
    report.structural.push_back("q2 shape differs from q1");
  }
  if (spec.r.rows() != q1.rows() || spec.r.cols() != q1.cols()) {
    report.structural.push_back("r shape differs from q1");
  }
  if (spec.n_core > spec.size()) {
    report.structural.push_back("n_core " + std::to_string(spec.n_core) + " exceeds n " +
                                std::to_string(spec.size()));
  }
  if (!report.structural.empty()) {
    return report;
  }

  const auto n = q1.rows();
  auto add = [&](Eigen::Index u, Eigen::Index v, std::string bound, double value, double limit) {
    report.violations.push_back(
        {static_cast<std::size_t>(u), static_cast<std::size_t>(v), std::move(bound), value, limit});
  };
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const double p = spec.q1(u, v);
      const double q = spec.q2(u, v);
      const double rho = spec.r(u, v);
      if (!std::isfinite(p) || !std::isfinite(q) || !std::isfinite(rho)) {
        add(u, v, "non-finite entry", 0.0, 0.0);
        continue;
      }
      if (p != spec.q1(v, u)) add(u, v, "q1 symmetry", p, spec.q1(v, u));
      if (q != spec.q2(v, u)) add(u, v, "q2 symmetry", q, spec.q2(v, u));
      if (rho != spec.r(v, u)) add(u, v, "r symmetry", rho, spec.r(v, u));
      if (p < 0.0 || p > 1.0) add(u, v, "q1 in [0,1]", p, p < 0.0 ? 0.0 : 1.0);
      if (q < 0.0 || q > 1.0) add(u, v, "q2 in [0,1]", q, q < 0.0 ? 0.0 : 1.0);
      if (rho < 0.0) {
        add(u, v, "r >= 0", rho, 0.0);
        continue;
      }
      if (rho > 1.0) {
        add(u, v, "r <= 1", rho, 1.0);
        continue;
      }
      const bool junk = static_cast<std::size_t>(u) >= spec.n_core || static_cast<std::size_t>(v) >= spec.n_core;
      if (junk && rho != 0.0) {
        add(u, v, "core-junk: r = 0 outside the core", rho, 0.0);
        continue;
      }
      const double pc = clamp_unit(p);
      const double qc = clamp_unit(q);
      if ((degenerate(pc) || degenerate(qc)) && rho != 0.0) {
        add(u, v, "degenerate marginal requires r = 0", rho, 0.0);
        continue;
      }
      const double cov = edge_covariance(pc, qc, rho);
      const double cap = covariance_cap(pc, qc);
      if (cov > cap + kFeasibilitySlack) {
        add(u, v, "feasibility: r <= max feasible correlation", rho, max_feasible_correlation(pc, qc));
      }
    }
  }
  return report;
}

void require_valid(const CorrSpec& spec) {
  const ValidationReport report = validate_spec(spec);
  if (!report.ok()) {
    throw ValidationError("invalid CorrSpec:\n" + report.to_string());
  }
}

BiBernParams bibern_params(double p, double q, double rho) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0 || rho < 0.0 || !std::isfinite(rho)) {
    throw FeasibilityError("bivariate Bernoulli parameters out of range");
  }
  if (degenerate(p) || degenerate(q)) {
    if (rho != 0.0) {
      throw FeasibilityError("degenerate marginal requires zero correlation");
    }
    return {p, q, q};
  }
  const double cov = edge_covariance(p, q, rho);
  if (cov > covariance_cap(p, q) + kFeasibilitySlack) {
    throw FeasibilityError("correlation " + std::to_string(rho) + " exceeds max feasible " +
                           std::to_string(max_feasible_correlation(p, q)));
  }
  return {p, clamp_unit((q * (1.0 - p) - cov) / (1.0 - p)), clamp_unit((q * p + cov) / p)};
}

GraphPair sample_pair(const CorrSpec& spec, std::uint64_t seed) {
  require_valid(spec);
  const auto n = static_cast<Eigen::Index>(spec.size());
  GraphPair pair{Matrix::Zero(n, n), Matrix::Zero(n, n), spec.n_core, false};
  for (Eigen::Index u = 0; u < n; ++u) {
    Substream rng(derive_seed(seed, {static_cast<std::uint64_t>(u)}));
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const BiBernParams z = bibern_params(spec.q1(u, v), spec.q2(u, v), spec.r(u, v));
      const bool z0 = rng.bernoulli(z.z0);
      const bool z1 = rng.bernoulli(z.z1);
      const bool z2 = rng.bernoulli(z.z2);
      const double a = z0 ? 1.0 : 0.0;
      const double b = (z0 ? z2 : z1) ? 1.0 : 0.0;
      pair.a(u, v) = pair.a(v, u) = a;
      pair.b(u, v) = pair.b(v, u) = b;
    }
  }
  return pair;
}

CorrSpec labeled_sbm_spec(const std::vector<std::size_t>& labels, const Matrix& q1_blocks,
                          const Matrix& q2_blocks, const Matrix& r_blocks,
                          std::optional<std::size_t> n_core) {
  const auto k = q1_blocks.rows();
  for (const Matrix* m : {&q1_blocks, &q2_blocks, &r_blocks}) {
    if (m->rows() != k || m->cols() != k) {
      throw DimensionError("block matrices must be square with a common dimension");
    }
    if (k > 0 && (*m - m->transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw ValidationError("block matrices must be symmetric");
    }
  }
  for (Eigen::Index s = 0; s < k; ++s) {
    for (Eigen::Index t = s; t < k; ++t) {
      const double p = q1_blocks(s, t);
      const double q = q2_blocks(s, t);
      const double rho = r_blocks(s, t);
      try {
        (void)bibern_params(p, q, rho);
      } catch (const FeasibilityError& e) {
        throw FeasibilityError("block (" + std::to_string(s) + "," + std::to_string(t) + "): " + e.what());
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  CorrSpec spec{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), n_core.value_or(labels.size())};
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto bu = static_cast<Eigen::Index>(labels[u]);
    if (bu >= k) {
      throw ValidationError("block label out of range at vertex " + std::to_string(u));
    }
    for (Eigen::Index v = 0; v < n; ++v) {
      const auto bv = static_cast<Eigen::Index>(labels[v]);
      if (bv >= k) {
        throw ValidationError("block label out of range at vertex " + std::to_string(v));
      }
      spec.q1(u, v) = q1_blocks(bu, bv);
      spec.q2(u, v) = q2_blocks(bu, bv);
      spec.r(u, v) = r_blocks(bu, bv);
    }
  }
  require_valid(spec);
  return spec;
}

CorrSpec sbm_spec(const std::vector<std::size_t>& block_sizes, const Matrix& q1_blocks, const Matrix& q2_blocks,
                  const Matrix& r_blocks, std::optional<std::size_t> n_core) {
  if (static_cast<Eigen::Index>(block_sizes.size()) != q1_blocks.rows()) {
    throw DimensionError("number of block sizes differs from block matrix dimension");
  }
  std::vector<std::size_t> labels;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    labels.insert(labels.end(), block_sizes[b], b);
  }
  return labeled_sbm_spec(labels, q1_blocks, q2_blocks, r_blocks, n_core);
}

CorrSpec homogeneous_spec(std::size_t n, double p, double q, double rho) {
  Matrix q1(1, 1), q2(1, 1), r(1, 1);
  q1 << p;
  q2 << q;
  r << rho;
  return sbm_spec({n}, q1, q2, r);
}

CorrSpec swapped_block_spec(std::size_t n_per_block, double alpha) {
  Matrix q1(2, 2), q2(2, 2), r(2, 2);
  q1 << 0.8, 0.1, 0.1, 0.2;
  q2 << 0.2, 0.1, 0.1, 0.8;
  r << 0.25, 0.3, 0.3, 0.25;
  return sbm_spec({n_per_block, n_per_block}, q1, q2, alpha * r);
}

Matrix hollow(const Matrix& q) {
  Matrix out = q;
  out.diagonal().setZero();
  return out;
}

Matrix covariance_matrix(const CorrSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  Matrix cov = Matrix::Zero(n, n);
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const double c = edge_covariance(spec.q1(u, v), spec.q2(u, v), spec.r(u, v));
      cov(u, v) = cov(v, u) = c;
    }
  }
  return cov;
}

double expected_trace(const CorrSpec& spec, const Permutation& p) {
  require_valid(spec);
  if (p.size() != spec.size()) {
    throw DimensionError("expected_trace: permutation size differs from spec size");
  }
  const auto n = static_cast<Eigen::Index>(spec.size());
  double total = 0.0;
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto tu = static_cast<Eigen::Index>(p[u]);
    for (Eigen::Index v = u + 1; v < n; ++v) {
      const auto tv = static_cast<Eigen::Index>(p[v]);
      const double q1 = spec.q1(u, v);
      if ((tu == u && tv == v) || (tu == v && tv == u)) {
        total += edge_covariance(q1, spec.q2(u, v), spec.r(u, v)) + q1 * spec.q2(u, v);
      } else {
        total += q1 * spec.q2(tu, tv);
      }
    }
  }
  return total;
}

}  // namespace gmlab

namespace gmlab {

CorrSpec with_core(CorrSpec spec, std::size_t n_core) {
  const auto n = static_cast<Eigen::Index>(spec.size());
  if (n_core > spec.size()) {
    throw ValidationError("with_core: n_core exceeds n");
  }
  const auto c = static_cast<Eigen::Index>(n_core);
  spec.r.rightCols(n - c).setZero();
  spec.r.bottomRows(n - c).setZero();
  spec.n_core = n_core;
  require_valid(spec);
  return spec;
}

}  // namespace gmlab
