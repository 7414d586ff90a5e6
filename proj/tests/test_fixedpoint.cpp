#include <doctest.h>

#include <cmath>

#include "autocorr/fixedpoint.hpp"
#include "autocorr/spectral.hpp"

using namespace autocorr;

TEST_CASE("single cell is a fixed point") {
  const DiscretizedKernel k = build_kernel(Weight::box(), 0.2, 2);
  StepFunction f = StepFunction::zeros(0.2, 0.1);
  f.values = {3.0};
  const FixedPointResult r = fixed_point_iterate(k, f);
  CHECK(r.converged);
  CHECK(r.iterations <= 2);
  CHECK(r.value == doctest::Approx(std::sqrt(0.2) * k.values[0]).epsilon(1e-14));
  const StepNorms n = norms(r.extremizer);
  CHECK(n.l1 * n.l2 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("iterates stay symmetric and nonnegative") {
  for (const Weight& w : {Weight::box(), Weight::gaussian()}) {
    const double delta = 0.02, radius = 1.5;
    const DiscretizedKernel k = build_kernel(w, delta, StepFunction::cell_count(delta, radius));
    FixedPointOptions opts;
    opts.tol = 1e-11;
    const FixedPointResult r = fixed_point_iterate(k, default_initial_guess(delta, radius), opts);
    CHECK(r.converged);
    const auto& v = r.extremizer.values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] >= 0.0);
      CHECK(std::abs(v[i] - v[v.size() - 1 - i]) <= 1e-12 * v[v.size() / 2]);
    }
    CHECK(feasibility_check(r.extremizer, 1e-8));
    CHECK(r.value == doctest::Approx(autocorrelation_ratio(k, r.extremizer)));
    // the trace values approach the final one
    CHECK(std::abs(r.trace.back().value - r.value) <= 1e-10);
  }
}

TEST_CASE("fixed point agrees with the spectral maximum on a coarse grid") {
  const double delta = 0.02, radius = 1.3;
  const DiscretizedKernel k = build_kernel(Weight::box(), delta, StepFunction::cell_count(delta, radius));
  const FixedPointResult fp = fixed_point_iterate(k, default_initial_guess(delta, radius));
  double best = 0.0;
  for (double lambda = 0.90; lambda <= 0.97; lambda += 0.0025)
    best = std::max(best, solve_c_lambda_delta(k, MixedNormParams::make(lambda, radius)).c_lambda_delta);
  CHECK(std::abs(fp.value - best) <= 1e-5);
  CHECK(fp.value >= best - 1e-5);
}

TEST_CASE("relaxation reaches the same value") {
  const double delta = 0.05, radius = 1.5;
  const DiscretizedKernel k = build_kernel(Weight::gaussian(), delta, StepFunction::cell_count(delta, radius));
  const FixedPointResult a = fixed_point_iterate(k, default_initial_guess(delta, radius));
  FixedPointOptions opts;
  opts.relaxation = 0.5;
  const FixedPointResult b = fixed_point_iterate(k, default_initial_guess(delta, radius), opts);
  CHECK(b.converged);
  CHECK(b.value == doctest::Approx(a.value).epsilon(1e-10));
}

TEST_CASE("bad inputs") {
  const DiscretizedKernel k = build_kernel(Weight::box(), 0.1, 20);
  StepFunction f = StepFunction::zeros(0.1, 1.0);
  CHECK_THROWS_AS(fixed_point_iterate(k, f), std::invalid_argument);
  f.values[3] = -1.0;
  f.values[4] = 1.0;
  CHECK_THROWS_AS(fixed_point_iterate(k, f), std::invalid_argument);
  FixedPointOptions opts;
  opts.relaxation = 1.5;
  CHECK_THROWS_AS(fixed_point_iterate(k, default_initial_guess(0.1, 1.0), opts), std::invalid_argument);
  CHECK_THROWS_AS(fixed_point_iterate(k, StepFunction::zeros(0.2, 1.0)), std::invalid_argument);
}

TEST_CASE("iteration cap") {
  const DiscretizedKernel k = build_kernel(Weight::box(), 0.05, 60);
  FixedPointOptions opts;
  opts.max_iter = 2;
  const FixedPointResult r = fixed_point_iterate(k, default_initial_guess(0.05, 1.5), opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK(r.trace.size() == 2);
}
