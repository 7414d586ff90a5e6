#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "autocorr/weight.hpp"

namespace autocorr {

/// A function constant on the cells [i delta - a, (i+1) delta - a), i < 2a/delta.
///
/// All integrals use delta times the counting measure, so the norms below are
/// the exact continuous norms of the step function.
struct StepFunction {
  double delta = 0.0;
  double radius = 0.0;
  std::vector<double> values;

  /// Throws std::invalid_argument unless 2 radius / delta is an integer.
  static StepFunction zeros(double delta, double radius);
  static std::size_t cell_count(double delta, double radius);

  std::size_t size() const { return values.size(); }
  double cell_left(std::size_t i) const {
    return static_cast<double>(i) * delta - radius;
  }
  double cell_midpoint(std::size_t i) const { return cell_left(i) + 0.5 * delta; }
};

struct StepNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double integral = 0.0;
  double l12 = 0.0;  // sqrt(l1 * l2)
};

StepNorms norms(const StepFunction& f);

/// Cell averages of f over [-radius, radius), quadrature tolerance 1e-12.
StepFunction project_delta(const std::function<double(double)>& f, double delta,
                           double radius);

/// Embeds f into a grid of the given radius, keeping it centred.  The padding on
/// each side must be a whole number of cells.
StepFunction zero_pad(const StepFunction& f, double radius);

/// Positive root of 1/lambda = 2 sqrt(lambda) b + 2 radius b^2.
double solve_b_lambda(double lambda, double radius);

/// Parameters of the H_lambda geometry on [-radius, radius).
struct MixedNormParams {
  double lambda = 1.0;
  double radius = 0.0;
  double b_lambda = 0.0;

  static MixedNormParams make(double lambda, double radius);
};

/// lambda ||f||_2^2 + |int f|^2 / lambda
double h_lambda_norm_sq(const StepFunction& f, const MixedNormParams& p);
/// lambda ||f||_2^2 + (int |f|)^2 / lambda
double b_lambda_norm_sq(const StepFunction& f, const MixedNormParams& p);

/// A = sqrt(lambda) Id + b |1><1|, so that <f, A A f> = ||f||_{H_lambda}^2.
StepFunction apply_A(const StepFunction& f, const MixedNormParams& p);
/// A^{-1} = lambda^{-1/2} (Id - b / (sqrt(lambda) + 2 a b) |1><1|).
StepFunction apply_A_inv(const StepFunction& f, const MixedNormParams& p);

// Vector forms of the whitening, operating in place on grid values of a block
// with the given delta; the radius inside p must equal size * delta / 2.
void apply_A_inplace(std::span<double> v, double delta, const MixedNormParams& p);
void apply_A_inv_inplace(std::span<double> v, double delta, const MixedNormParams& p);

/// delta^2 sum_{i,j} f_i w~(|i-j| delta) g_j, the continuous bilinear form
/// int int f(x) g(y) w(x - y) dx dy restricted to step functions.
double quadratic_form(const DiscretizedKernel& kernel, const StepFunction& f,
                      const StepFunction& g);

}  // namespace autocorr
