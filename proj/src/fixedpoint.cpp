#include "autocorr/fixedpoint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "autocorr/toeplitz.hpp"

namespace autocorr {

namespace {

void normalize_l12(std::vector<double>& v, double delta) {
  double l1 = 0.0, sq = 0.0;
  for (double x : v) {
    l1 += std::abs(x);
    sq += x * x;
  }
  const double prod = delta * l1 * std::sqrt(delta * sq);
  const double s = 1.0 / std::sqrt(prod);
  for (double& x : v) x *= s;
}

}  // namespace

double autocorrelation_ratio(const DiscretizedKernel& kernel, const StepFunction& f) {
  const StepNorms n = norms(f);
  if (!(n.l1 > 0.0)) return 0.0;
  return quadratic_form(kernel, f, f) / (n.l1 * n.l2);
}

StepFunction default_initial_guess(double delta, double radius) {
  StepFunction f = StepFunction::zeros(delta, radius);
  const double half = 0.5 * radius;
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = std::max(0.0, 1.0 - std::abs(f.cell_midpoint(i)) / half);
  if (std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; }))
    std::fill(f.values.begin(), f.values.end(), 1.0);
  return f;
}

FixedPointResult fixed_point_iterate(const DiscretizedKernel& kernel, const StepFunction& f0,
                                     const FixedPointOptions& opts) {
  if (std::abs(kernel.delta - f0.delta) > 1e-12 * f0.delta)
    throw std::invalid_argument("fixed_point_iterate: kernel built for a different delta");
  if (std::any_of(f0.values.begin(), f0.values.end(), [](double v) { return v < 0.0; }))
    throw std::invalid_argument("fixed_point_iterate: initial guess must be nonnegative");
  if (std::all_of(f0.values.begin(), f0.values.end(), [](double v) { return v == 0.0; }))
    throw std::invalid_argument("fixed_point_iterate: initial guess is zero");
  if (!(opts.relaxation > 0.0 && opts.relaxation <= 1.0))
    throw std::invalid_argument("fixed_point_iterate: relaxation must lie in (0, 1]");

  const double delta = f0.delta;
  const std::size_t m = f0.size();
  ToeplitzConvolver conv(kernel, m);

  FixedPointResult out;
  std::vector<double> f = f0.values;
  normalize_l12(f, delta);
  std::vector<double> kf(m), next(m);

  double prev_value = 0.0;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    conv.apply(f, kf);
    double q = 0.0, l1 = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      q += f[i] * kf[i];
      l1 += std::abs(f[i]);
      sq += f[i] * f[i];
    }
    q *= delta;
    l1 *= delta;
    sq *= delta;
    const double value = q / (l1 * std::sqrt(sq));

    bool any = false;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] = sq * std::max(2.0 * kf[i] / q - 1.0 / l1, 0.0);
      any = any || next[i] > 0.0;
    }
    if (!any)
      throw std::runtime_error(
          "fixed-point iterate collapsed to zero; try a wider or smoother initial guess");
    normalize_l12(next, delta);
    if (opts.relaxation < 1.0) {
      for (std::size_t i = 0; i < m; ++i)
        next[i] = (1.0 - opts.relaxation) * f[i] + opts.relaxation * next[i];
      normalize_l12(next, delta);
    }

    double change = 0.0, top = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      change = std::max(change, std::abs(next[i] - f[i]));
      top = std::max(top, std::abs(next[i]));
    }
    const double sup_change = change / top;
    const double value_change = it > 1 ? std::abs(value - prev_value) / value : 0.0;
    if (opts.record_trace) out.trace.push_back({it, value, sup_change});
    f.swap(next);
    prev_value = value;
    out.iterations = it;
    out.last_delta = sup_change;
    if (sup_change <= opts.tol && value_change <= opts.tol) {
      out.converged = true;
      break;
    }
  }

  out.extremizer.delta = delta;
  out.extremizer.radius = f0.radius;
  out.extremizer.values = std::move(f);
  out.value = autocorrelation_ratio(kernel, out.extremizer);
  return out;
}

}  // namespace autocorr
