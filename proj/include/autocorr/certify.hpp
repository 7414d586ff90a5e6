#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "autocorr/spectral.hpp"
#include "autocorr/stepspace.hpp"
#include "autocorr/weight.hpp"

namespace autocorr {

/// 16 delta^2 / (pi^2 c lambda^2), with c any positive lower bound for c_lambda.
double discretization_error_bound(double c_lower_at_lambda, double lambda, double delta);

/// Largest delta keeping discretization_error_bound <= eps_target for all
/// lambda >= lambda_min.
double choose_delta(double eps_target, double lambda_min, double c_lb);

struct LambdaRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// c_lambda <= min(2 lambda, 2 / lambda) < c_lb outside (c_lb / 2, 2 / c_lb).
LambdaRange lambda_range(double c_lb);

/// Slack covering max over lambda* in the bracket of c_{lambda*}, given a bound
/// c_best at the bracket centre: the smaller of the Lipschitz slack step/2 and
/// the secant slack c_best ((lambda*/lambda + lambda/lambda*)/2 - 1).
double lambda_grid_term(double c_best, std::pair<double, double> lambda_star_bracket,
                        double lambda_step);

enum class RadiusMode { coarse, fine };

struct RadiusBound {
  double radius = 0.0;
  RadiusMode used = RadiusMode::coarse;
  std::string note;
};

/// Support half-width of extremizers: coarse a <= 2 ||w||_1^2 / c^2, fine from
/// the squared Euler-Lagrange identity.  Fine mode falls back to coarse when
/// its precondition fails.
RadiusBound support_radius_bound(const WeightNorms& wn, double c_lb, RadiusMode mode);

/// Rounds up to a whole number of cells on each side, so the grid has an even
/// cell count and is symmetric about 0.
double snap_radius(double radius, double delta);

struct SweepConfig {
  double delta = 0.0;
  double eps_target = 0.0;  // used to pick delta when delta <= 0
  double lambda_lo = 0.0;   // <= 0: from lambda_range
  double lambda_hi = 0.0;
  double lambda_step = 0.01;
  double radius = 0.0;  // <= 0: from support_radius_bound
  double c_lb_prior = 0.0;  // <= 0: bootstrapped
  RadiusMode radius_mode = RadiusMode::fine;
  bool refine = true;
  ScanMode scan = ScanMode::warm;
  std::size_t workers = 1;
  std::size_t chunk = 16;
  SpectralOptions spectral;
};

struct LambdaPoint {
  double lambda = 0.0;
  int pass = 0;  // 0 coarse grid, 1 refinement
  double c = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  double discretization = 0.0;
  double grid_slack = 0.0;
  double upper = 0.0;
  std::size_t cells = 0;
  bool feasible = true;
  bool converged = true;
  bool near_degenerate = false;
  std::size_t iterations = 0;
  bool covers = true;  // false when superseded by the refinement pass
  std::vector<ScanRow> scan;
};

struct ErrorTerms {
  double discretization = 0.0;
  double lambda_grid = 0.0;
  double eigen_residual = 0.0;
  std::string radius_note;
};

struct BoundsReport {
  std::string weight;
  double lower = 0.0;
  double upper = 0.0;
  double lambda_star = 0.0;
  double lambda_upper = 0.0;  // grid point attaining the upper bound
  double delta = 0.0;
  double lambda_step = 0.0;
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double radius = 0.0;
  double c_lb = 0.0;
  std::string c_lb_source;
  RadiusMode radius_mode = RadiusMode::coarse;
  double radius_bound = 0.0;
  double l1_over_l2 = 0.0;  // of the extremizer, compare with lambda_star
  std::size_t infeasible_points = 0;
  std::size_t unconverged_points = 0;
  std::size_t degenerate_points = 0;
  ErrorTerms error_terms;
  std::vector<LambdaPoint> per_lambda;
  StepFunction extremizer;  // on the sweep grid (one extra half cell for odd blocks)
  std::size_t extremizer_cells = 0;
};

/// Rigorous lower bound from one coarse solve at lambda = 1 (delta 0.05).
double bootstrap_lower_bound(const Weight& w);

BoundsReport sweep(const Weight& weight, const SweepConfig& cfg);

}  // namespace autocorr
