#include "gmlab/corr_er.hpp"
#include "gmlab/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace gmlab;

namespace {

Matrix block2(double a, double b, double c) {
  Matrix m(2, 2);
  m << a, b, b, c;
  return m;
}

// Example 1 block model: Q1 = [[p, r], [r, q]], Q2 = [[q, r], [r, p]],
// R = [[rho1, rho2], [rho2, rho1]], n vertices per block.
CorrSpec example_one(std::size_t n) {
  return sbm_spec({n, n}, block2(0.8, 0.1, 0.2), block2(0.2, 0.1, 0.8), block2(0.25, 0.3, 0.25));
}

// Random feasible spec on n vertices, every pair drawn independently.
CorrSpec random_spec(std::size_t n, Substream& rng) {
  CorrSpec s{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), n};
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = 0.05 + 0.9 * rng.uniform();
      const double q = 0.05 + 0.9 * rng.uniform();
      const double r = rng.uniform() * max_feasible_correlation(p, q);
      s.q1(u, v) = s.q1(v, u) = p;
      s.q2(u, v) = s.q2(v, u) = q;
      s.r(u, v) = s.r(v, u) = r;
    }
  return s;
}

}  // namespace

TEST_SUITE("corr_er") {

TEST_CASE("max feasible correlation") {
  CHECK(max_feasible_correlation(0.8, 0.2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(max_feasible_correlation(0.2, 0.8) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(max_feasible_correlation(0.5, 0.5) == doctest::Approx(1.0));
  CHECK(max_feasible_correlation(0.9, 0.1) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(max_feasible_correlation(0.0, 0.4) == 0.0);
  CHECK(max_feasible_correlation(0.3, 1.0) == 0.0);
}

TEST_CASE("validate_spec reports each violated pair") {
  CHECK(validate_spec(homogeneous_spec(5, 0.5, 0.5, 1.0)).ok());

  CorrSpec s = homogeneous_spec(4, 0.8, 0.2, 0.1);
  s.r(1, 3) = s.r(3, 1) = 0.3;
  auto report = validate_spec(s);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].u == 1);
  CHECK(report.violations[0].v == 3);
  CHECK(report.violations[0].value == doctest::Approx(0.3));
  CHECK(report.violations[0].limit == doctest::Approx(0.25));

  CorrSpec d = homogeneous_spec(3, 0.5, 0.5, 0.0);
  d.q1(0, 2) = d.q1(2, 0) = 0.0;
  d.r(0, 2) = d.r(2, 0) = 0.1;
  CHECK(validate_spec(d).violations.size() == 1);

  CorrSpec bad = homogeneous_spec(3, 0.5, 0.5, 0.0);
  bad.q2 = Matrix::Zero(4, 4);
  CHECK_FALSE(validate_spec(bad).structural.empty());
  CHECK_THROWS_AS(require_valid(bad), ValidationError);
}

TEST_CASE("bibern parameters") {
  auto z = bibern_params(0.5, 0.5, 0.6);
  CHECK(z.z0 == doctest::Approx(0.5));
  CHECK(z.z1 == doctest::Approx(0.2));
  CHECK(z.z2 == doctest::Approx(0.8));

  z = bibern_params(0.3, 0.7, 0.0);
  CHECK(z.z0 == doctest::Approx(0.3));
  CHECK(z.z1 == doctest::Approx(0.7));
  CHECK(z.z2 == doctest::Approx(0.7));

  z = bibern_params(1.0, 0.3, 0.0);
  CHECK(z.z0 == 1.0);
  CHECK(z.z1 == doctest::Approx(0.3));
  CHECK(z.z2 == doctest::Approx(0.3));

  CHECK_THROWS_AS(bibern_params(0.8, 0.2, 0.3), FeasibilityError);
  CHECK_THROWS_AS(bibern_params(0.0, 0.2, 0.1), FeasibilityError);
}

TEST_CASE("bibern triple reproduces the joint table") {
  Substream rng(7);
  for (int t = 0; t < 200; ++t) {
    const double p = rng.uniform(), q = rng.uniform();
    const double rho = rng.uniform() * max_feasible_correlation(p, q);
    const auto z = bibern_params(p, q, rho);
    const double cov = edge_covariance(p, q, rho);
    // X = Z0, Y = Z0 Z2 + (1 - Z0) Z1.
    const double p11 = z.z0 * z.z2;
    const double p01 = (1 - z.z0) * z.z1;
    CHECK(p11 == doctest::Approx(p * q + cov).epsilon(1e-12));
    CHECK(p11 + p01 == doctest::Approx(q).epsilon(1e-12));
    for (double zi : {z.z0, z.z1, z.z2}) {
      CHECK(zi >= 0.0);
      CHECK(zi <= 1.0);
    }
  }
}

TEST_CASE("degenerate and complete specs") {
  const std::size_t n = 6;
  CorrSpec zero{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), n};
  auto g = sample_pair(zero, 3);
  CHECK(g.a.isZero());
  CHECK(g.b.isZero());

  CorrSpec full{Matrix::Ones(n, n), Matrix::Ones(n, n), Matrix::Zero(n, n), n};
  g = sample_pair(full, 3);
  Matrix complete = Matrix::Ones(n, n) - Matrix::Identity(n, n);
  CHECK(g.a == complete);
  CHECK(g.b == complete);
}

TEST_CASE("sampler is deterministic and hollow") {
  auto spec = example_one(20);
  auto g1 = sample_pair(spec, 99);
  auto g2 = sample_pair(spec, 99);
  auto g3 = sample_pair(spec, 100);
  CHECK(g1.a == g2.a);
  CHECK(g1.b == g2.b);
  CHECK(g1.a != g3.a);
  CHECK(g1.a == g1.a.transpose());
  CHECK(g1.b == g1.b.transpose());
  CHECK(g1.a.diagonal().isZero());
  CHECK(g1.b.diagonal().isZero());
}

TEST_CASE("homogeneous sampler moments") {
  auto g = sample_pair(homogeneous_spec(200, 0.5, 0.5, 0.6), 2024);
  std::vector<double> x, y;
  for (int u = 0; u < 200; ++u)
    for (int v = u + 1; v < 200; ++v) {
      x.push_back(g.a(u, v));
      y.push_back(g.b(u, v));
    }
  CHECK(x.size() == 19900);
  CHECK(std::abs(oracle::pearson(x, y) - 0.6) < 0.02);
}

TEST_CASE("single-entry marginals, correlation and joint law over many samples") {
  struct Case {
    double p, q, rho;
  };
  const int samples = 20000;
  for (Case c : {Case{0.5, 0.5, 0.6}, Case{0.8, 0.2, 0.25}, Case{0.3, 0.6, 0.2}, Case{0.1, 0.1, 0.9}}) {
    CAPTURE(c.p);
    CAPTURE(c.q);
    const auto spec = homogeneous_spec(2, c.p, c.q, c.rho);
    int n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    std::vector<double> x, y;
    for (int s = 0; s < samples; ++s) {
      auto g = sample_pair(spec, derive_seed(5, {static_cast<std::uint64_t>(s)}));
      const bool a = g.a(0, 1) > 0, b = g.b(0, 1) > 0;
      x.push_back(a);
      y.push_back(b);
      (a ? (b ? n11 : n10) : (b ? n01 : n00))++;
    }
    const double cov = edge_covariance(c.p, c.q, c.rho);
    const double expect[4] = {c.p * c.q + cov, c.p * (1 - c.q) - cov, (1 - c.p) * c.q - cov,
                              (1 - c.p) * (1 - c.q) + cov};
    const int got[4] = {n11, n10, n01, n00};
    for (int i = 0; i < 4; ++i) {
      const double f = got[i] / double(samples);
      const double var = std::max(0.0, expect[i] * (1 - expect[i]));
      CHECK(std::abs(f - expect[i]) <= 4 * std::sqrt(var / samples) + 1e-12);
    }
    const double ma = (n11 + n10) / double(samples), mb = (n11 + n01) / double(samples);
    CHECK(std::abs(ma - c.p) <= 4 * std::sqrt(c.p * (1 - c.p) / samples));
    CHECK(std::abs(mb - c.q) <= 4 * std::sqrt(c.q * (1 - c.q) / samples));
    // Standard error of a sample correlation is roughly (1 - rho^2) / sqrt(N).
    CHECK(std::abs(oracle::pearson(x, y) - c.rho) <= 4 * (1 - c.rho * c.rho) / std::sqrt(samples) + 1e-3);
  }
}

TEST_CASE("feasibility boundary") {
  for (auto [p, q] : {std::pair{0.8, 0.2}, std::pair{0.3, 0.6}, std::pair{0.9, 0.1}}) {
    const double m = max_feasible_correlation(p, q);
    CHECK_NOTHROW(sample_pair(homogeneous_spec(5, p, q, m), 1));
    CHECK_THROWS_AS(homogeneous_spec(5, p, q, m + 1e-6), FeasibilityError);
    auto over = homogeneous_spec(5, p, q, m);
    over.r(1, 2) = over.r(2, 1) = m + 1e-6;
    CHECK_THROWS_AS(sample_pair(over, 1), ValidationError);
  }
}

TEST_CASE("block specs") {
  const auto s = swapped_block_spec(3, 1.0);
  CHECK(s.size() == 6);
  CHECK(s.q1(0, 1) == 0.8);
  CHECK(s.q1(0, 4) == 0.1);
  CHECK(s.q1(4, 5) == 0.2);
  CHECK(s.q2(0, 1) == 0.2);
  CHECK(s.q2(4, 5) == 0.8);
  CHECK(s.r(0, 1) == 0.25);
  CHECK(s.r(1, 3) == 0.3);
  CHECK(swapped_block_spec(3, 0.5).r(1, 3) == doctest::Approx(0.15));

  Matrix one(1, 1);
  one << 0.4;
  Matrix rho(1, 1);
  rho << 0.5;
  const auto h = sbm_spec({5}, one, one, rho);
  const auto ref = homogeneous_spec(5, 0.4, 0.4, 0.5);
  for (int u = 0; u < 5; ++u)
    for (int v = 0; v < 5; ++v)
      if (u != v) {
        CHECK(h.q1(u, v) == ref.q1(u, v));
        CHECK(h.r(u, v) == ref.r(u, v));
      }

  // Correlation only inside the first block: a core of two vertices.
  Matrix q = block2(0.5, 0.5, 0.5);
  Matrix r = block2(0.3, 0.0, 0.0);
  CHECK(sbm_spec({2, 2}, q, q, r, 2).n_core == 2);
  CHECK_NOTHROW(sbm_spec({2, 2}, q, q, r));
  CHECK_THROWS_AS(sbm_spec({2, 2}, q, q, r, 1), ValidationError);

  CHECK_THROWS_AS(sbm_spec({2, 2}, block2(0.8, 0.1, 0.2), block2(0.2, 0.1, 0.8), block2(0.3, 0.0, 0.0)),
                  FeasibilityError);
}

TEST_CASE("expected trace at the identity") {
  Substream rng(11);
  const auto s = random_spec(7, rng);
  double want = 0.0;
  for (int u = 0; u < 7; ++u)
    for (int v = u + 1; v < 7; ++v)
      want += s.r(u, v) * std::sqrt(s.q1(u, v) * (1 - s.q1(u, v)) * s.q2(u, v) * (1 - s.q2(u, v))) +
              s.q1(u, v) * s.q2(u, v);
  CHECK(expected_trace(s, Permutation::identity(7)) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("independent homogeneous spec makes the expected trace constant") {
  const auto s = homogeneous_spec(4, 0.5, 0.5, 0.0);
  oracle::for_each_permutation(4, [&](const Permutation& p) { CHECK(expected_trace(s, p) == doctest::Approx(1.5)); });
}

TEST_CASE("Example 1 block swap gap") {
  // Closed form of the exact gap: C(n,2)[(p-q)^2 - 2 rho1 s] - (n^2 - n) rho2 r (1 - r),
  // s = sqrt(p(1-p)q(1-q)), which is 0.113 (n^2 - n) at the stated parameters.
  for (std::size_t n : {2, 5, 17, 40}) {
    const auto spec = example_one(n);
    const double gap = expected_trace(spec, Permutation::block_swap(2 * n)) -
                       expected_trace(spec, Permutation::identity(2 * n));
    const double nn = static_cast<double>(n);
    CHECK(gap == doctest::Approx(0.113 * (nn * nn - nn)).epsilon(1e-12));
  }
}

TEST_CASE("expected trace matches a Monte-Carlo average") {
  const std::size_t n = 10;
  const int samples = 3000;
  Substream rng(31);
  for (int t = 0; t < 10; ++t) {
    const auto spec = random_spec(n, rng);
    const auto p = Permutation::random(n, 1000 + t);
    double sum = 0, sumsq = 0;
    for (int s = 0; s < samples; ++s) {
      auto g = sample_pair(spec, derive_seed(77, {std::uint64_t(t), std::uint64_t(s)}));
      const double v = 0.5 * oracle::trace_apbpt(g.a, g.b, p);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sumsq / samples - mean * mean) / samples);
    CHECK(std::abs(mean - expected_trace(spec, p)) <= 4 * se);
  }
}

TEST_CASE("with_core zeroes junk correlations") {
  auto s = with_core(homogeneous_spec(5, 0.5, 0.5, 0.4), 3);
  CHECK(s.n_core == 3);
  CHECK(s.r(0, 2) == 0.4);
  CHECK(s.r(0, 3) == 0.0);
  CHECK(s.r(4, 3) == 0.0);
  CHECK(covariance_matrix(s)(3, 4) == 0.0);
  CHECK(covariance_matrix(s)(0, 1) == doctest::Approx(0.1));
}

}  // TEST_SUITE
