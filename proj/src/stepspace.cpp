#include "autocorr/stepspace.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "autocorr/toeplitz.hpp"

namespace autocorr {

namespace {

bool same_geometry(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

double delta_integral(std::span<const double> v, double delta) {
  return delta * std::accumulate(v.begin(), v.end(), 0.0);
}

void check_params(const StepFunction& f, const MixedNormParams& p) {
  if (!same_geometry(f.radius, p.radius))
    throw std::invalid_argument(fmt::format(
        "step function radius {} does not match norm radius {}", f.radius, p.radius));
}

}  // namespace

std::size_t StepFunction::cell_count(double delta, double radius) {
  if (!(delta > 0.0) || !(radius > 0.0))
    throw std::invalid_argument("step grid needs positive delta and radius");
  const double cells = 2.0 * radius / delta;
  const double rounded = std::round(cells);
  if (rounded < 1.0 || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells))
    throw std::invalid_argument(fmt::format(
        "radius {} is not a multiple of delta/2 = {}", radius, 0.5 * delta));
  return static_cast<std::size_t>(rounded);
}

StepFunction StepFunction::zeros(double delta, double radius) {
  StepFunction f;
  f.delta = delta;
  f.radius = radius;
  f.values.assign(cell_count(delta, radius), 0.0);
  return f;
}

StepNorms norms(const StepFunction& f) {
  StepNorms n;
  double sq = 0.0;
  for (double v : f.values) {
    n.l1 += std::abs(v);
    sq += v * v;
    n.integral += v;
  }
  n.l1 *= f.delta;
  n.integral *= f.delta;
  n.l2 = std::sqrt(f.delta * sq);
  n.l12 = std::sqrt(n.l1 * n.l2);
  return n;
}

StepFunction project_delta(const std::function<double(double)>& f, double delta,
                           double radius) {
  StepFunction out = StepFunction::zeros(delta, radius);
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double mid = out.cell_midpoint(i);
    auto mapped = [&](double u) { return f(mid + 0.5 * delta * u); };
    out.values[i] = 0.5 * GK::integrate(mapped, -1.0, 1.0, 15, 1e-13);
  }
  return out;
}

StepFunction zero_pad(const StepFunction& f, double radius) {
  const double extra = (radius - f.radius) / f.delta;
  const double rounded = std::round(extra);
  if (rounded < 0.0 || std::abs(extra - rounded) > 1e-9 * std::max(1.0, extra))
    throw std::invalid_argument(fmt::format(
        "cannot pad radius {} to {} by whole cells of width {}", f.radius, radius, f.delta));
  const auto pad = static_cast<std::size_t>(rounded);
  StepFunction out;
  out.delta = f.delta;
  out.radius = radius;
  out.values.assign(f.size() + 2 * pad, 0.0);
  std::copy(f.values.begin(), f.values.end(), out.values.begin() + static_cast<std::ptrdiff_t>(pad));
  return out;
}

double solve_b_lambda(double lambda, double radius) {
  if (!(lambda > 0.0) || !(radius > 0.0))
    throw std::invalid_argument("solve_b_lambda: lambda and radius must be positive");
  // Rationalized root of 2a b^2 + 2 sqrt(lambda) b - 1/lambda = 0.
  const double s = std::sqrt(lambda);
  return (1.0 / lambda) / (s + std::sqrt(lambda + 2.0 * radius / lambda));
}

MixedNormParams MixedNormParams::make(double lambda, double radius) {
  return {lambda, radius, solve_b_lambda(lambda, radius)};
}

double h_lambda_norm_sq(const StepFunction& f, const MixedNormParams& p) {
  check_params(f, p);
  const StepNorms n = norms(f);
  return p.lambda * n.l2 * n.l2 + n.integral * n.integral / p.lambda;
}

double b_lambda_norm_sq(const StepFunction& f, const MixedNormParams& p) {
  check_params(f, p);
  const StepNorms n = norms(f);
  return p.lambda * n.l2 * n.l2 + n.l1 * n.l1 / p.lambda;
}

void apply_A_inplace(std::span<double> v, double delta, const MixedNormParams& p) {
  const double shift = p.b_lambda * delta_integral(v, delta);
  const double s = std::sqrt(p.lambda);
  for (double& x : v) x = s * x + shift;
}

void apply_A_inv_inplace(std::span<double> v, double delta, const MixedNormParams& p) {
  const double s = std::sqrt(p.lambda);
  const double gamma = p.b_lambda / (s + 2.0 * p.radius * p.b_lambda);
  const double shift = gamma * delta_integral(v, delta);
  for (double& x : v) x = (x - shift) / s;
}

StepFunction apply_A(const StepFunction& f, const MixedNormParams& p) {
  check_params(f, p);
  StepFunction out = f;
  apply_A_inplace(out.values, f.delta, p);
  return out;
}

StepFunction apply_A_inv(const StepFunction& f, const MixedNormParams& p) {
  check_params(f, p);
  StepFunction out = f;
  apply_A_inv_inplace(out.values, f.delta, p);
  return out;
}

double quadratic_form(const DiscretizedKernel& kernel, const StepFunction& f,
                      const StepFunction& g) {
  if (f.size() != g.size() || !same_geometry(f.delta, g.delta) ||
      !same_geometry(f.radius, g.radius))
    throw std::invalid_argument("quadratic_form: step functions live on different grids");
  if (!same_geometry(f.delta, kernel.delta))
    throw std::invalid_argument("quadratic_form: kernel built for a different delta");
  if (f.size() == 0) return 0.0;
  std::vector<double> kg(g.size());
  ToeplitzConvolver conv(kernel, g.size());
  conv.apply(g.values, kg);
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f.values[i] * kg[i];
  return f.delta * acc;
}

}  // namespace autocorr
