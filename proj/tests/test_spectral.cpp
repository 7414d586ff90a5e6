#include <doctest.h>

#include <cmath>
#include <random>

#include "autocorr/spectral.hpp"
#include "support/oracles.hpp"

using namespace autocorr;
namespace oracle = autocorr::testing;

TEST_CASE("power method on a 2x2 operator") {
  LinearOperator op = [](std::span<const double> x, std::span<double> y) {
    y[0] = 2.0 * x[0] + x[1];
    y[1] = x[0] + 2.0 * x[1];
  };
  const PowerResult r = power_iterate(op, {1.0, 0.3}, {});
  CHECK(r.converged);
  CHECK(r.mu == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(r.vector[0] - r.vector[1]) <= 1e-12);
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("power method flags a stall between equal eigenvalues") {
  // eigenvalues 1 and -1: the iteration never settles
  LinearOperator op = [](std::span<const double> x, std::span<double> y) {
    y[0] = x[1];
    y[1] = x[0];
  };
  PowerOptions opts;
  opts.max_iter = 50;
  const PowerResult r = power_iterate(op, {1.0, 0.0}, opts);
  CHECK_FALSE(r.converged);
}

TEST_CASE("power method against a dense eigensolver") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 8 + static_cast<std::size_t>(u(rng) * 56);
    // random symmetric Toeplitz kernel with nonnegative, decreasing taps
    DiscretizedKernel k{0.05, std::vector<double>(m)};
    double v = 1.0;
    for (double& x : k.values) {
      x = v;
      v *= 0.5 + 0.5 * u(rng);
    }
    std::vector<double> dense(m * m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        dense[i * m + j] = k.at(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j));
    LinearOperator op = [&](std::span<const double> x, std::span<double> y) {
      for (std::size_t i = 0; i < m; ++i) {
        y[i] = 0.0;
        for (std::size_t j = 0; j < m; ++j) y[i] += dense[i * m + j] * x[j];
      }
    };
    const PowerResult r = power_iterate(op, std::vector<double>(m, 1.0), {});
    CHECK(r.converged);
    CHECK(std::abs(r.mu - oracle::dense_top_eigenvalue(dense, m)) <= 1e-10);
  }
}

TEST_CASE("single-cell block") {
  for (double lambda : {0.5, 1.0, 1.7}) {
    const double delta = 0.2;
    const DiscretizedKernel k = build_kernel(Weight::box(), delta, 4);
    const BlockEigenpair e = top_eigenpair(k, MixedNormParams::make(lambda, 0.4), 1);
    const double expected = 2.0 * delta * delta * k.values[0] / (lambda * delta + delta * delta / lambda);
    CHECK(e.mu == doctest::Approx(expected).epsilon(1e-14));
    CHECK(e.f.size() == 1);
    CHECK(e.f.values[0] > 0.0);
  }
}

TEST_CASE("feasibility check") {
  const std::vector<double> ok{1, 2, 3, 3, 2, 1};
  CHECK(feasibility_check(ok, 1e-8));
  const std::vector<double> neg{1, -0.5, 1};
  CHECK_FALSE(feasibility_check(neg, 1e-9));
  const std::vector<double> peak{1, 2, 1}, dip{2, 1, 2};
  CHECK(feasibility_check(peak, 1e-8));
  CHECK_FALSE(feasibility_check(dip, 1e-8));
  const std::vector<double> lopsided{1, 2, 3, 2.5};
  CHECK_FALSE(feasibility_check(lopsided, 1e-8));
  const std::vector<double> dust{-1e-10, 1, 1, -1e-10};
  CHECK(feasibility_check(dust, 1e-8));
  CHECK_FALSE(feasibility_check(std::vector<double>{}, 1e-8));
}

TEST_CASE("eigenpair normalization and whitening consistency") {
  const DiscretizedKernel k = build_kernel(Weight::gaussian(), 0.05, 60);
  const MixedNormParams p = MixedNormParams::make(0.9, 1.5);
  for (std::size_t cells : {3, 10, 25, 60}) {
    const BlockEigenpair e = top_eigenpair(k, p, cells);
    CHECK(e.converged);
    const MixedNormParams q = MixedNormParams::make(p.lambda, e.f.radius);
    CHECK(h_lambda_norm_sq(e.f, q) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(norms(e.f).integral > 0.0);
    CHECK(2.0 * quadratic_form(k, e.f, e.f) == doctest::Approx(e.mu).epsilon(1e-10));
  }
}

TEST_CASE("solution properties") {
  for (const Weight& w : {Weight::box(), Weight::gaussian()}) {
    const double delta = 0.05, radius = 1.5;
    const std::size_t n = StepFunction::cell_count(delta, radius);
    const DiscretizedKernel k = build_kernel(w, delta, n);
    for (double lambda = 0.4; lambda < 2.6; lambda += 0.2) {
      const MixedNormParams p = MixedNormParams::make(lambda, radius);
      SpectralOptions full;
      full.mode = ScanMode::full;
      const SpectralSolution s = solve_c_lambda_delta(k, p, full);
      CHECK(s.feasible);
      CHECK(s.c_lambda_delta <= std::min(2.0 * lambda, 2.0 / lambda));

      const StepFunction& f = s.extremizer;
      const MixedNormParams q = MixedNormParams::make(lambda, f.radius);
      const double quotient = 2.0 * quadratic_form(k, f, f) / h_lambda_norm_sq(f, q);
      CHECK(quotient == doctest::Approx(s.c_lambda_delta).epsilon(1e-10));
      StepFunction g = f;
      for (double& v : g.values) v *= 37.5;
      CHECK(2.0 * quadratic_form(k, g, g) / h_lambda_norm_sq(g, q) ==
            doctest::Approx(quotient).epsilon(1e-14));

      for (const ScanRow& row : s.scan)
        if (row.feasible) CHECK(row.mu <= s.mu);
      // a symmetric vector on k cells pads to one on k + 2 cells
      for (std::size_t i = 2; i < s.scan.size(); ++i)
        CHECK(s.scan[i].mu >= s.scan[i - 2].mu - 1e-12);

      SpectralOptions warm;
      const SpectralSolution t = solve_c_lambda_delta(k, p, warm);
      CHECK(t.support_cells == s.support_cells);
      CHECK(t.c_lambda_delta == doctest::Approx(s.c_lambda_delta).epsilon(1e-14));
    }
  }
}

TEST_CASE("dense oracle equivalence") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Weight weights[] = {Weight::box(), Weight::gaussian(), oracle::triangle_weight()};
  for (int trial = 0; trial < 10; ++trial) {
    const Weight& w = weights[trial % 3];
    const std::size_t n = 2 * (4 + static_cast<std::size_t>(u(rng) * 28));  // 8..64 cells
    const double radius = 0.8 + 1.2 * u(rng);
    const double delta = 2.0 * radius / static_cast<double>(n);
    const double lambda = 0.5 + 1.2 * u(rng);
    const DiscretizedKernel k = build_kernel(w, delta, n);
    const MixedNormParams p = MixedNormParams::make(lambda, radius);
    SpectralOptions opts;
    opts.mode = ScanMode::full;
    const SpectralSolution s = solve_c_lambda_delta(k, p, opts);
    const oracle::DenseMax d = oracle::dense_constrained_max(k, lambda, n);
    const oracle::DenseMax e =
        oracle::dense_constrained_max(k, lambda, n, 1e-8, oracle::Subspace::even);
    INFO(w.descriptor(), " n=", n, " lambda=", lambda);
    REQUIRE(d.any_feasible);
    CHECK(std::abs(s.c_lambda_delta - d.c) <= 1e-10);
    CHECK(std::abs(s.c_lambda_delta - e.c) <= 1e-10);
    CHECK(s.support_cells == d.cells);
    for (const ScanRow& row : s.scan) {
      CHECK(std::abs(row.mu - e.blocks[row.cells - 1].mu) <= 1e-10);
      CHECK(row.feasible == e.blocks[row.cells - 1].feasible);
    }
  }
}

TEST_CASE("grid too large for the kernel") {
  const DiscretizedKernel k = build_kernel(Weight::box(), 0.1, 5);
  CHECK_THROWS_AS(solve_c_lambda_delta(k, MixedNormParams::make(1.0, 1.0)), std::invalid_argument);
}
