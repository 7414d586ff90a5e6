#pragma once

#include <cstddef>
#include <vector>

#include "autocorr/stepspace.hpp"
#include "autocorr/weight.hpp"

namespace autocorr {

struct FixedPointOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  double relaxation = 1.0;  // theta in (0, 1]; 1 is the undamped update
  bool record_trace = true;
};

struct TraceRow {
  std::size_t iteration = 0;
  double value = 0.0;
  double sup_change = 0.0;
};

struct FixedPointResult {
  double value = 0.0;  // Q(f, f) / (||f||_1 ||f||_2), a lower bound on C_opt
  StepFunction extremizer;  // normalized to ||f||_1 ||f||_2 = 1
  std::size_t iterations = 0;
  bool converged = false;
  double last_delta = 0.0;
  std::vector<TraceRow> trace;
};

/// Q(f, f) / (||f||_1 ||f||_2)
double autocorrelation_ratio(const DiscretizedKernel& kernel, const StepFunction& f);

/// Centred triangular bump supported on [-radius/2, radius/2].
StepFunction default_initial_guess(double delta, double radius);

/// Iterates f <- ||f||_2^2 max(2 (w~ * f) / Q(f, f) - 1 / ||f||_1, 0), the
/// Euler-Lagrange equation read as a fixed-point map, renormalizing every step.
/// Throws std::runtime_error if an iterate clips to zero.
FixedPointResult fixed_point_iterate(const DiscretizedKernel& kernel, const StepFunction& f0,
                                     const FixedPointOptions& opts = {});

}  // namespace autocorr
