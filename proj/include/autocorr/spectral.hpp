#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "autocorr/stepspace.hpp"
#include "autocorr/weight.hpp"

namespace autocorr {

/// y = M x for a symmetric operator on R^m.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct PowerOptions {
  double tol = 1e-12;        // on ||M g - mu g||_2 with ||g||_2 = 1
  std::size_t max_iter = 0;  // 0 means 50 * dimension
  double degenerate_gap = 1e-13;
};

struct PowerResult {
  double mu = 0.0;
  std::vector<double> vector;  // unit Euclidean norm
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
  // Set when the iteration stalls on two Ritz values closer than degenerate_gap.
  bool near_degenerate = false;
  double second_candidate = 0.0;
};

/// Plain power method with Rayleigh-quotient extraction.
PowerResult power_iterate(const LinearOperator& op, std::vector<double> start,
                          const PowerOptions& opts);

struct BlockEigenpair {
  double mu = 0.0;
  StepFunction f;  // on the block's own grid, radius = cells * delta / 2
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool near_degenerate = false;
  double second_candidate = 0.0;
};

/// Top eigenpair of M = 2 A^{-1} K A^{-1} among symmetric vectors on a centred
/// block of support_cells cells.  Only p.lambda is used; the rank-one part of A
/// uses the block's own length.  The returned f = A^{-1} g has ||f||_{H_lambda} = 1 and nonnegative sum.
BlockEigenpair top_eigenpair(const DiscretizedKernel& kernel, const MixedNormParams& p,
                             std::size_t support_cells, const PowerOptions& opts = {});

/// Nonnegative up to -tol * max, symmetric and non-increasing away from the
/// centre, each up to tol * max.
bool feasibility_check(std::span<const double> v, double tol);
bool feasibility_check(const StepFunction& v, double tol);

enum class ScanMode { full, warm };

struct SpectralOptions {
  PowerOptions power;
  double feasibility_tol = 1e-8;
  ScanMode mode = ScanMode::warm;
  std::size_t patience = 10;
  std::size_t hint_cells = 0;  // warm mode start; 0 seeds by bisection on feasibility
  bool record_scan = true;
};

struct ScanRow {
  std::size_t cells = 0;
  double mu = 0.0;
  bool feasible = false;
  std::size_t iterations = 0;
  bool converged = false;
};

struct SpectralSolution {
  double lambda = 0.0;
  double delta = 0.0;
  // 2 Q(f, f) / ||f||_{H_lambda}^2 of the clipped extremizer: a witnessed lower
  // bound for the discrete problem and hence for c_lambda.
  double c_lambda_delta = 0.0;
  double mu = 0.0;  // power-method eigenvalue at the winning block
  StepFunction extremizer;
  std::size_t support_cells = 0;
  bool feasible = false;  // false when the fallback (clipped infeasible vector) was used
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool near_degenerate = false;
  std::vector<ScanRow> scan;

  /// Value used on the upper-bound side: the eigenvalue plus its residual.
  double upper_value() const;
};

class NoFeasibleSupport : public std::runtime_error {
 public:
  NoFeasibleSupport(const std::string& what, BlockEigenpair best)
      : std::runtime_error(what), best_candidate(std::move(best)) {}
  BlockEigenpair best_candidate;
};

/// Maximizes over centred blocks of 1..N cells, N = 2 p.radius / kernel.delta,
/// keeping blocks whose top eigenvector is feasible.
SpectralSolution solve_c_lambda_delta(const DiscretizedKernel& kernel,
                                      const MixedNormParams& p,
                                      const SpectralOptions& opts = {});

}  // namespace autocorr
