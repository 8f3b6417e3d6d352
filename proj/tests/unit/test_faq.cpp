#include "gmlab/assignment.hpp"
#include "gmlab/corr_er.hpp"
#include "gmlab/faq.hpp"
#include "gmlab/matchability.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace gmlab;

namespace {

Matrix weighted(std::size_t n, Substream& rng) {
  return oracle::random_symmetric(n, rng, [](Substream& r) { return r.uniform() * 2 - 1; });
}

Matrix random_ds(std::size_t n, std::uint64_t seed) { return DoublyStochastic::random_interior(n, seed).matrix(); }

Matrix mix(const Matrix& d, const Matrix& q, double alpha) { return (1 - alpha) * d + alpha * q; }

}  // namespace

TEST_SUITE("faq") {

TEST_CASE("doubly stochastic construction") {
  const auto bary = DoublyStochastic::barycenter(4);
  CHECK(bary.matrix().isApprox(Matrix::Constant(4, 4, 0.25)));
  const auto p = Permutation::random(6, 3);
  CHECK(DoublyStochastic::from_permutation(p).matrix() == p.to_matrix());

  const Matrix r = random_ds(7, 12);
  CHECK((r.rowwise().sum().array() - 1).abs().maxCoeff() < 1e-12);
  CHECK((r.colwise().sum().array() - 1).abs().maxCoeff() < 1e-12);

  Matrix bad = Matrix::Constant(3, 3, 1.0 / 3);
  bad(0, 0) += 1e-6;
  CHECK_THROWS_AS(DoublyStochastic{bad}, ValidationError);
  Matrix neg = Matrix::Identity(2, 2);
  neg(0, 1) = -1e-13;
  neg(0, 0) += 1e-13;
  const DoublyStochastic clamped{neg};
  CHECK(clamped.matrix()(0, 1) == 0.0);
  Matrix very_neg = Matrix::Identity(2, 2);
  very_neg(0, 1) = -0.5;
  very_neg(0, 0) = 1.5;
  CHECK_THROWS_AS(DoublyStochastic{very_neg}, ValidationError);
}

TEST_CASE("objective identities") {
  Substream rng(1);
  const Matrix a = weighted(5, rng);
  auto o = gm_objective(a, a, Permutation::identity(5));
  CHECK(o.frobenius_sq == doctest::Approx(0.0));
  CHECK(o.trace_form == doctest::Approx(-a.squaredNorm()));

  const Matrix b = weighted(5, rng);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = Permutation::random(5, s);
    o = gm_objective(Matrix::Zero(5, 5), b, p);
    CHECK(o.frobenius_sq == doctest::Approx(b.squaredNorm()));
    CHECK(o.trace_form == 0.0);

    o = gm_objective(a, b, p);
    CHECK(std::abs(o.frobenius_sq - oracle::frobenius_sq(a, b, p)) < 1e-10);
    CHECK(o.trace_form == doctest::Approx(-oracle::trace_apbpt(a, b, p)));
    CHECK(o.frobenius_sq == doctest::Approx(a.squaredNorm() + b.squaredNorm() + 2 * o.trace_form));
  }
  CHECK_THROWS_AS(gm_objective(a, Matrix::Zero(4, 4), Permutation::identity(5)), DimensionError);
}

TEST_CASE("relaxed objective agrees with the permutation form") {
  Substream rng(2);
  const Matrix a = weighted(6, rng), b = weighted(6, rng);
  const auto p = Permutation::random(6, 9);
  CHECK(relaxed_objective(a, b, p.to_matrix()) == doctest::Approx(gm_objective(a, b, p).trace_form));
}

TEST_CASE("gradient closed forms") {
  Substream rng(3);
  const std::size_t n = 5;
  const Matrix a = weighted(n, rng), b = weighted(n, rng);
  const Matrix g = relaxed_gradient(a, b, DoublyStochastic::barycenter(n));
  CHECK(g.isApprox(-(2.0 / n) * a * Matrix::Ones(n, n) * b));
  CHECK(relaxed_gradient(Matrix::Zero(n, n), b, DoublyStochastic::barycenter(n)).isZero());
  CHECK(relaxed_gradient(a, Matrix::Zero(n, n), DoublyStochastic::barycenter(n)).isZero());
}

TEST_CASE("gradient matches central finite differences") {
  Substream rng(4);
  const double h = 1e-6;
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 3 + rng.below(6);
    const Matrix a = weighted(n, rng), b = weighted(n, rng);
    const DoublyStochastic d{random_ds(n, 100 + t)};
    const Matrix dir = Permutation::random(n, 200 + t).to_matrix() - d.matrix();
    const double fd = (relaxed_objective(a, b, d.matrix() + h * dir) - relaxed_objective(a, b, d.matrix() - h * dir)) /
                      (2 * h);
    const double analytic = (relaxed_gradient(a, b, d).array() * dir.array()).sum();
    CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("quadratic step rule") {
  CHECK(quadratic_step(-1.0, 1.0) == doctest::Approx(0.5));
  CHECK(quadratic_step(-4.0, 1.0) == 1.0);
  CHECK(quadratic_step(1.0, 1.0) == 0.0);
  CHECK(quadratic_step(-1.0, 0.0) == 1.0);
  CHECK(quadratic_step(0.0, 0.0) == 0.0);
  CHECK(quadratic_step(1.0, -0.5) == 0.0);
  CHECK(quadratic_step(0.2, -0.5) == 1.0);
}

TEST_CASE("line search at a vertex with a zero direction") {
  Substream rng(5);
  const Matrix a = weighted(5, rng), b = weighted(5, rng);
  const auto p = Permutation::random(5, 1);
  CHECK(exact_line_search(a, b, DoublyStochastic::from_permutation(p), p) == 0.0);
}

TEST_CASE("line search against independent evaluations") {
  Substream rng(6);
  int interior = 0, concave = 0;
  for (int t = 0; t < 300 && (interior < 10 || concave < 10); ++t) {
    const std::size_t n = 4 + rng.below(4);
    const Matrix a = weighted(n, rng), b = weighted(n, rng);
    const DoublyStochastic d{random_ds(n, 300 + t)};
    const auto q = Permutation::random(n, 400 + t);
    const Matrix qm = q.to_matrix();
    // g along the segment is an exact quadratic; recover it from three points.
    const double g0 = relaxed_objective(a, b, d.matrix());
    const double gh = relaxed_objective(a, b, mix(d.matrix(), qm, 0.5));
    const double g1 = relaxed_objective(a, b, qm);
    const double c2 = 2 * (g1 - 2 * gh + g0);
    const double c1 = g1 - g0 - c2;
    const double alpha = exact_line_search(a, b, d, q);
    REQUIRE(alpha >= 0.0);
    REQUIRE(alpha <= 1.0);
    const double scale = std::max({1.0, std::abs(c1), std::abs(c2)});
    if (c2 > 1e-9 && alpha > 0 && alpha < 1) {
      ++interior;
      CHECK(std::abs(c1 + 2 * c2 * alpha) <= 1e-8 * scale);
    } else if (c2 < -1e-9) {
      ++concave;
      CHECK((alpha == 0.0 || alpha == 1.0));
      CHECK(relaxed_objective(a, b, mix(d.matrix(), qm, alpha)) <= std::min(g0, g1) + 1e-9 * scale);
    }
    const double g_alpha = relaxed_objective(a, b, mix(d.matrix(), qm, alpha));
    for (double s : {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0})
      CHECK(g_alpha <= relaxed_objective(a, b, mix(d.matrix(), qm, s)) + 1e-9 * scale);
  }
  CHECK(interior >= 10);
  CHECK(concave >= 10);
}

TEST_CASE("identical graphs from the truth stay put") {
  auto g = sample_pair(homogeneous_spec(30, 0.5, 0.5, 1.0), 17);
  CHECK(g.a == g.b);
  MatchOptions opts;
  opts.init = InitPermutation{Permutation::identity(30)};
  const auto r = faq_match(g.a, g.b, opts);
  CHECK(r.permutation.is_identity());
  CHECK(r.objective == 0.0);
  CHECK(r.converged);
  CHECK(r.init_label == "identity");
}

TEST_CASE("iterates descend and stay doubly stochastic") {
  Substream rng(7);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 6 + rng.below(20);
    const Matrix a = oracle::random_graph(n, 0.4, rng), b = oracle::random_graph(n, 0.4, rng);
    std::vector<Matrix> iterates;
    const auto r = faq_run(a, b, DoublyStochastic::barycenter(n), "barycenter", 30, 1e-6,
                           [&](std::size_t k, const Matrix& d) {
                             CHECK(k == iterates.size());
                             iterates.push_back(d);
                           });
    REQUIRE(iterates.size() == r.relaxed_trace.size());
    for (std::size_t k = 0; k < iterates.size(); ++k) {
      const Matrix& d = iterates[k];
      CHECK(d.minCoeff() >= -1e-12);
      CHECK((d.rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-8);
      CHECK((d.colwise().sum().array() - 1).abs().maxCoeff() <= 1e-8);
      CHECK(r.relaxed_trace[k] == doctest::Approx(relaxed_objective(a, b, d)).epsilon(1e-9));
      if (k > 0) CHECK(r.relaxed_trace[k] <= r.relaxed_trace[k - 1] + 1e-9 * std::abs(r.relaxed_trace[k - 1]));
    }
    CHECK(r.objective == doctest::Approx(gm_objective(a, b, r.permutation).frobenius_sq));
  }
}

TEST_CASE("never better than the exact optimum") {
  Substream rng(8);
  for (int t = 0; t < 15; ++t) {
    const std::size_t n = 4 + rng.below(4);
    const Matrix a = weighted(n, rng), b = weighted(n, rng);
    MatchOptions opts;
    opts.restarts = 3;
    opts.restart_seed = t;
    const auto r = faq_match(a, b, opts);
    CHECK(r.objective >= brute_force_gmp(a, b).objective - 1e-9);
  }
}

TEST_CASE("a fixed point admits no improving direction") {
  Substream rng(9);
  int witnessed = 0;
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 5 + rng.below(2);
    const Matrix a = oracle::random_graph(n, 0.5, rng);
    const Matrix b = oracle::random_graph(n, 0.5, rng);
    const auto p = Permutation::random(n, 500 + t);
    MatchOptions opts;
    opts.init = InitPermutation{p};
    const auto r = faq_match(a, b, opts);
    if (!(r.iterations == 1 && r.steps.front() == 0.0 && r.permutation == p)) continue;
    ++witnessed;
    const Matrix grad = relaxed_gradient(a, b, DoublyStochastic::from_permutation(p));
    const Matrix pm = p.to_matrix();
    oracle::for_each_permutation(n, [&](const Permutation& q) {
      CHECK((grad.array() * (q.to_matrix() - pm).array()).sum() >= -1e-9);
    });
  }
  CHECK(witnessed > 0);
}

TEST_CASE("restarts reach the oracle on small correlated pairs") {
  const auto spec = homogeneous_spec(6, 0.5, 0.5, 0.8);
  int hits = 0;
  for (int t = 0; t < 10; ++t) {
    const auto g = sample_pair(spec, 7000 + t);
    MatchOptions opts;
    opts.restarts = 20;
    opts.restart_seed = t;
    const auto r = faq_match(g.a, g.b, opts);
    const double best = brute_force_gmp(g.a, g.b).objective;
    CHECK(r.objective >= best - 1e-9);
    hits += std::abs(r.objective - best) <= 1e-9;
  }
  CHECK(hits >= 8);
}

TEST_CASE("restart reduction does not depend on threads") {
  Substream rng(10);
  const Matrix a = oracle::random_graph(25, 0.3, rng), b = oracle::random_graph(25, 0.3, rng);
  MatchOptions opts;
  opts.restarts = 6;
  opts.restart_seed = 99;
  const auto serial = faq_match(a, b, opts);
  opts.threads = 4;
  const auto parallel = faq_match(a, b, opts);
  CHECK(serial.permutation == parallel.permutation);
  CHECK(serial.objective == parallel.objective);
  CHECK(serial.iterations == parallel.iterations);
  CHECK(serial.init_label == parallel.init_label);
}

TEST_CASE("the truth survives at moderate correlation") {
  const auto spec = homogeneous_spec(100, 0.5, 0.5, 0.9);
  int stayed = 0;
  for (int s = 0; s < 20; ++s) {
    const auto g = sample_pair(spec, 3000 + s);
    MatchOptions opts;
    opts.init = InitPermutation{Permutation::identity(100)};
    stayed += faq_match(g.a, g.b, opts).permutation.is_identity();
  }
  CHECK(stayed >= 18);
}

TEST_CASE("bad inputs") {
  MatchOptions opts;
  CHECK_THROWS_AS(faq_match(Matrix::Zero(3, 3), Matrix::Zero(4, 4), opts), DimensionError);
  opts.init = InitPermutation{Permutation::identity(4)};
  CHECK_THROWS_AS(faq_match(Matrix::Zero(3, 3), Matrix::Zero(3, 3), opts), ValidationError);
  MatchOptions zero_iters;
  zero_iters.max_iters = 0;
  CHECK_THROWS_AS(zero_iters.validate(), ValidationError);
  MatchOptions bad_tol;
  bad_tol.rel_tol = 0.0;
  CHECK_THROWS_AS(bad_tol.validate(), ValidationError);
}

}  // TEST_SUITE
