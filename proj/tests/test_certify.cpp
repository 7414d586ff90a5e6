#include <doctest.h>

#include <cmath>
#include <numbers>

#include "autocorr/certify.hpp"

using namespace autocorr;

namespace {

// a = 2 (r - sqrt(a/2) s)^2 solved as a quadratic in t = sqrt(a/2): t = r - t s.
double fine_radius_closed_form(double l1, double l2_squared, double c) {
  const double r = l1 / c;
  const double s = 1.0 / std::sqrt(4.0 * l2_squared / (c * c) - 3.0);
  const double t = r / (1.0 + s);
  return 2.0 * t * t;
}

}  // namespace

TEST_CASE("discretization error bound") {
  CHECK(discretization_error_bound(0.8, 1.0, 1.45e-3) == doctest::Approx(4.26e-6).epsilon(2e-3));
  CHECK(discretization_error_bound(0.8, 1.0, 0.0) == 0.0);
  const double e = discretization_error_bound(0.7, 0.9, 0.01);
  CHECK(discretization_error_bound(0.7, 0.9, 0.005) == doctest::Approx(e / 4.0));
  CHECK_THROWS_AS(discretization_error_bound(0.0, 1.0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(discretization_error_bound(-0.1, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("choose delta") {
  const double d = choose_delta(1e-5, 0.7, 0.7);
  CHECK(d == doctest::Approx(1.454e-3).epsilon(1e-3));
  CHECK(choose_delta(4e-5, 0.7, 0.7) == doctest::Approx(2.0 * d));
  for (double lambda : {0.7, 0.9, 1.5, 3.0})
    CHECK(discretization_error_bound(0.7, lambda, d) <= 1e-5 * (1.0 + 1e-12));
}

TEST_CASE("lambda range") {
  const LambdaRange a = lambda_range(0.7);
  CHECK(a.lo == doctest::Approx(0.35));
  CHECK(a.hi == doctest::Approx(2.857142857));
  const LambdaRange b = lambda_range(0.8);
  CHECK(b.lo == doctest::Approx(0.4));
  CHECK(b.hi == doctest::Approx(2.5));
  const LambdaRange c = lambda_range(2.0);
  CHECK(c.lo == doctest::Approx(1.0));
  CHECK(c.hi == doctest::Approx(1.0));
  CHECK_THROWS(lambda_range(0.0));
}

TEST_CASE("lambda grid slack") {
  const double s = lambda_grid_term(0.8, {0.9995, 1.0005}, 0.001);
  CHECK(s == doctest::Approx(1.0e-7).epsilon(1e-2));
  CHECK(s < 5e-4);
  CHECK(lambda_grid_term(0.8, {1.0, 1.0}, 0.0) == 0.0);
  double prev = 0.0;
  for (double step : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
    const double t = lambda_grid_term(0.8, {1.0 - step / 2, 1.0 + step / 2}, step);
    CHECK(t > prev);
    CHECK(t <= step / 2);
    prev = t;
  }
}

TEST_CASE("support radius bounds") {
  const WeightNorms box{1.0, 1.0, 1.0, 2.0};
  const WeightNorms gauss{1.0, 1.0 / std::numbers::sqrt2, 1.0, 2.0};
  const RadiusBound cb = support_radius_bound(box, 0.8, RadiusMode::coarse);
  CHECK(cb.radius == doctest::Approx(3.125));
  CHECK(cb.used == RadiusMode::coarse);
  CHECK(support_radius_bound(gauss, 1.0 / std::numbers::sqrt2, RadiusMode::coarse).radius ==
        doctest::Approx(4.0));

  for (double c : {0.7, 0.75, 0.8, 0.8055}) {
    const RadiusBound fb = support_radius_bound(box, c, RadiusMode::fine);
    CHECK(fb.used == RadiusMode::fine);
    CHECK(fb.radius == doctest::Approx(fine_radius_closed_form(1.0, 1.0, c)).epsilon(1e-12));
    CHECK(fb.radius <= support_radius_bound(box, c, RadiusMode::coarse).radius);
  }
  const RadiusBound gf = support_radius_bound(gauss, 0.7071, RadiusMode::fine);
  CHECK(gf.radius == doctest::Approx(fine_radius_closed_form(1.0, gauss.l2_squared, 0.7071)).epsilon(1e-12));

  // 4 |w|_2^2 / c^2 - 3 <= 0 makes the fine bound unavailable
  const WeightNorms flat{1.0, 0.3, 1.0, 2.0};
  const RadiusBound fallback = support_radius_bound(flat, 0.9, RadiusMode::fine);
  CHECK(fallback.used == RadiusMode::coarse);
  CHECK(fallback.note.find("unavailable") != std::string::npos);
  CHECK_THROWS(support_radius_bound(box, 0.0, RadiusMode::coarse));
}

TEST_CASE("radius snapping") {
  CHECK(snap_radius(1.2733, 0.01) == doctest::Approx(1.28));
  CHECK(snap_radius(1.28, 0.01) == doctest::Approx(1.28));
  CHECK(snap_radius(0.001, 0.01) == doctest::Approx(0.01));
  CHECK(StepFunction::cell_count(0.00145, snap_radius(1.2733, 0.00145)) == 1758);
}

TEST_CASE("small sweep") {
  SweepConfig cfg;
  cfg.delta = 0.05;
  cfg.lambda_step = 0.05;
  const BoundsReport rep = sweep(Weight::box(), cfg);
  CHECK(rep.lower <= rep.upper);
  CHECK(rep.lower > 0.79);
  CHECK(rep.upper < 0.83);
  CHECK(rep.lambda_lo == doctest::Approx(rep.c_lb / 2));
  CHECK(rep.lambda_hi == doctest::Approx(2 / rep.c_lb));
  CHECK(rep.infeasible_points == 0);
  CHECK(rep.l1_over_l2 == doctest::Approx(rep.lambda_star).epsilon(0.02));
  for (const LambdaPoint& p : rep.per_lambda) {
    CHECK(p.c <= rep.lower);
    if (p.covers) CHECK(p.upper <= rep.upper);
    CHECK(p.c <= std::min(2 * p.lambda, 2 / p.lambda));
  }
  // odd blocks sit on the sweep grid shifted by half a cell
  const double pad = rep.extremizer_cells % 2 ? 0.5 * rep.delta : 0.0;
  CHECK(rep.extremizer.radius == doctest::Approx(rep.radius + pad).epsilon(1e-12));

  SweepConfig many = cfg;
  many.workers = 3;
  many.chunk = 2;
  const BoundsReport par = sweep(Weight::box(), many);
  CHECK(par.lower == rep.lower);
  CHECK(par.upper == rep.upper);
  CHECK(par.per_lambda.size() == rep.per_lambda.size());

  cfg.lambda_step = 0.0;
  CHECK_THROWS(sweep(Weight::box(), cfg));
}
