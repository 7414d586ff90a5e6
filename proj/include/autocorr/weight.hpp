#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace autocorr {

enum class WeightKind { box, gaussian, tabulated };

struct WeightNorms {
  double l1 = 0.0;
  double l2_squared = 0.0;
  double linf = 0.0;
  double tv = 0.0;  // total variation
};

struct WeightSample {
  double value = 0.0;
  bool extrapolated = false;
};

/// A symmetric, non-increasing weight on [0, inf) with unit L1 and sup norms.
///
/// The box weight is the indicator of [-1/2, 1/2] and the Gaussian weight is
/// exp(-pi x^2); both satisfy the normalization exactly.  Tabulated weights are
/// piecewise linear through samples given on a symmetric grid and vanish
/// outside the sampled range.  Construction validates symmetry, monotonicity
/// and the normalization, throwing std::invalid_argument with a diagnostic.
class Weight {
 public:
  static Weight box();
  static Weight gaussian();
  static Weight tabulated(std::vector<double> xs, std::vector<double> ws);
  /// Two-column text file (x, w(x)); an optional non-numeric header line and
  /// '#' comments are skipped.
  static Weight load_tabulated(const std::filesystem::path& path);

  WeightKind kind() const { return kind_; }
  double operator()(double x) const;
  WeightSample sample(double x) const;
  WeightNorms norms() const;

  /// Points where w or its derivative may jump.  Quadrature splits here.
  std::vector<double> breakpoints() const;
  /// Smallest R with w = 0 outside [-R, R]; infinity for the Gaussian.
  double support_radius() const;
  std::string descriptor() const;

  const std::vector<double>& sample_x() const { return xs_; }
  const std::vector<double>& sample_w() const { return ws_; }

 private:
  explicit Weight(WeightKind kind) : kind_(kind) {}

  WeightKind kind_;
  std::vector<double> xs_;
  std::vector<double> ws_;
  std::string source_;
};

/// C_opt for exp(-a x^2) (sup norm 1, L1 norm sqrt(pi/a)) equals this factor
/// times C_opt for exp(-pi x^2).  Dilating a weight by L scales the optimal
/// constant by sqrt(L).
double gaussian_constant_scale(double exponent);

/// Toeplitz symbol of the convolution operator restricted to a delta-grid:
/// values[k] = w~(k delta), the triangular-window average of w around k delta.
struct DiscretizedKernel {
  double delta = 0.0;
  std::vector<double> values;

  std::size_t n() const { return values.size(); }
  double at(std::ptrdiff_t lag) const {
    const auto k = static_cast<std::size_t>(lag < 0 ? -lag : lag);
    return k < values.size() ? values[k] : 0.0;
  }
};

enum class KernelMethod { automatic, quadrature };

/// Builds n lags.  Box uses the closed form unless KernelMethod::quadrature is
/// requested; other kinds always go through adaptive Gauss-Kronrod with
/// absolute tolerance 1e-12 (relative to delta^2).
DiscretizedKernel build_kernel(const Weight& w, double delta, std::size_t n,
                               KernelMethod method = KernelMethod::automatic);

}  // namespace autocorr
