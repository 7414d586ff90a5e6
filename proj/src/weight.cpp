#include "autocorr/weight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace autocorr {

namespace {

constexpr double kNormTolerance = 1e-12;
constexpr double kKernelTolerance = 1e-12;

// Integral of the unit-height tent (delta - |t|) from -delta to x.
double tent_cdf(double x, double delta) {
  if (x <= -delta) return 0.0;
  if (x >= delta) return delta * delta;
  if (x <= 0.0) return 0.5 * (x + delta) * (x + delta);
  return delta * delta - 0.5 * (delta - x) * (delta - x);
}

double box_kernel_value(double s, double delta) {
  const double lo = std::max(s - delta, -0.5);
  const double hi = std::min(s + delta, 0.5);
  if (hi <= lo) return 0.0;
  return (tent_cdf(hi - s, delta) - tent_cdf(lo - s, delta)) / (delta * delta);
}

double quadrature_kernel_value(const Weight& w, double s, double delta,
                               std::size_t lag) {
  std::vector<double> cuts{s - delta, s, s + delta};
  for (double b : w.breakpoints())
    if (b > s - delta && b < s + delta) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double inv = 1.0 / (delta * delta);
  auto integrand = [&](double t) {
    return w(t) * (delta - std::abs(t - s)) * inv;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    // Boost reports the error of the [-1, 1] integral unscaled, so map there first.
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double half = 0.5 * (cuts[i + 1] - cuts[i]);
    auto mapped = [&](double u) { return half * integrand(mid + half * u); };
    double err = 0.0;
    total += GK::integrate(mapped, -1.0, 1.0, 15, 1e-13, &err);
    if (!(err <= kKernelTolerance)) {
      throw std::runtime_error(fmt::format(
          "kernel quadrature did not converge at lag {} (error estimate {:.3e})",
          lag, err));
    }
  }
  return total;
}

}  // namespace

Weight Weight::box() {
  Weight w(WeightKind::box);
  w.source_ = "box";
  return w;
}

Weight Weight::gaussian() {
  Weight w(WeightKind::gaussian);
  w.source_ = "gaussian";
  return w;
}

Weight Weight::tabulated(std::vector<double> xs, std::vector<double> ws) {
  if (xs.size() != ws.size())
    throw std::invalid_argument("tabulated weight: x and w columns differ in length");
  if (xs.size() < 2)
    throw std::invalid_argument("tabulated weight: need at least two samples");
  const std::size_t n = xs.size();
  const double scale = std::max(std::abs(xs.front()), std::abs(xs.back()));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(xs[i + 1] > xs[i]))
      throw std::invalid_argument(
          fmt::format("tabulated weight: x not strictly increasing at row {}", i + 1));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    if (std::abs(xs[i] + xs[j]) > kNormTolerance * std::max(1.0, scale))
      throw std::invalid_argument(
          fmt::format("tabulated weight: grid not symmetric (x[{}] = {}, x[{}] = {})",
                      i, xs[i], j, xs[j]));
    if (std::abs(ws[i] - ws[j]) > kNormTolerance)
      throw std::invalid_argument(fmt::format(
          "tabulated weight: values not symmetric at x = {} ({} vs {})", xs[i], ws[i], ws[j]));
    if (ws[i] < 0.0)
      throw std::invalid_argument(
          fmt::format("tabulated weight: negative value {} at x = {}", ws[i], xs[i]));
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (xs[i] >= 0.0 && ws[i + 1] > ws[i] + kNormTolerance)
      throw std::invalid_argument(fmt::format(
          "tabulated weight: increases on [0, inf) between x = {} and x = {}", xs[i],
          xs[i + 1]));
  }

  Weight w(WeightKind::tabulated);
  w.xs_ = std::move(xs);
  w.ws_ = std::move(ws);
  w.source_ = "tabulated";
  const WeightNorms nrm = w.norms();
  if (std::abs(nrm.linf - 1.0) > kNormTolerance)
    throw std::invalid_argument(fmt::format(
        "tabulated weight: sup norm is {:.17g}, expected 1 (rescale the samples)", nrm.linf));
  if (std::abs(nrm.l1 - 1.0) > kNormTolerance)
    throw std::invalid_argument(fmt::format(
        "tabulated weight: L1 norm is {:.17g}, expected 1 (dilate the grid)", nrm.l1));
  return w;
}

Weight Weight::load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight table " + path.string());
  std::vector<double> xs, ws;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    if (!(row >> x >> v)) {
      if (xs.empty() && lineno == 1) continue;  // header
      throw std::runtime_error(
          fmt::format("{}:{}: expected two numeric columns", path.string(), lineno));
    }
    xs.push_back(x);
    ws.push_back(v);
  }
  Weight w = tabulated(std::move(xs), std::move(ws));
  w.source_ = "tabulated:" + path.string();
  return w;
}

WeightSample Weight::sample(double x) const {
  switch (kind_) {
    case WeightKind::box:
      return {std::abs(x) <= 0.5 ? 1.0 : 0.0, false};
    case WeightKind::gaussian:
      return {std::exp(-std::numbers::pi * x * x), false};
    case WeightKind::tabulated: {
      if (x < xs_.front() || x > xs_.back()) return {0.0, true};
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.end()) return {ws_.back(), false};
      const auto i = static_cast<std::size_t>(it - xs_.begin()) - 1;
      const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
      return {ws_[i] + t * (ws_[i + 1] - ws_[i]), false};
    }
  }
  return {0.0, false};
}

double Weight::operator()(double x) const { return sample(x).value; }

WeightNorms Weight::norms() const {
  switch (kind_) {
    case WeightKind::box:
      return {1.0, 1.0, 1.0, 2.0};
    case WeightKind::gaussian:
      return {1.0, 1.0 / std::numbers::sqrt2, 1.0, 2.0};
    case WeightKind::tabulated: {
      WeightNorms n;
      n.linf = *std::max_element(ws_.begin(), ws_.end());
      n.tv = ws_.front() + ws_.back();
      for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
        const double h = xs_[i + 1] - xs_[i];
        const double a = ws_[i], b = ws_[i + 1];
        n.l1 += 0.5 * h * (a + b);
        n.l2_squared += h * (a * a + a * b + b * b) / 3.0;
        n.tv += std::abs(b - a);
      }
      return n;
    }
  }
  return {};
}

std::vector<double> Weight::breakpoints() const {
  switch (kind_) {
    case WeightKind::box:
      return {-0.5, 0.5};
    case WeightKind::gaussian:
      return {};
    case WeightKind::tabulated:
      return xs_;
  }
  return {};
}

double Weight::support_radius() const {
  switch (kind_) {
    case WeightKind::box:
      return 0.5;
    case WeightKind::gaussian:
      return std::numeric_limits<double>::infinity();
    case WeightKind::tabulated:
      return xs_.back();
  }
  return 0.0;
}

std::string Weight::descriptor() const { return source_; }

double gaussian_constant_scale(double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("gaussian exponent must be positive");
  return std::pow(std::numbers::pi / exponent, 0.25);
}

DiscretizedKernel build_kernel(const Weight& w, double delta, std::size_t n,
                               KernelMethod method) {
  if (!(delta > 0.0)) throw std::invalid_argument("build_kernel: delta must be positive");
  if (n < 1) throw std::invalid_argument("build_kernel: need at least one lag");
  DiscretizedKernel kernel;
  kernel.delta = delta;
  kernel.values.resize(n);
  const bool closed_form =
      w.kind() == WeightKind::box && method == KernelMethod::automatic;
  const double reach = w.support_radius() + delta;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) * delta;
    if (s - delta >= reach) break;  // compactly supported weight, rest is zero
    kernel.values[k] = closed_form ? box_kernel_value(s, delta)
                                   : quadrature_kernel_value(w, s, delta, k);
  }
  return kernel;
}

}  // namespace autocorr
