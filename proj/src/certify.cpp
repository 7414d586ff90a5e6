#include "autocorr/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace autocorr {

double discretization_error_bound(double c_lower_at_lambda, double lambda, double delta) {
  if (!(c_lower_at_lambda > 0.0))
    throw std::invalid_argument(
        "discretization_error_bound needs a positive lower bound for c_lambda");
  if (!(lambda > 0.0)) throw std::invalid_argument("discretization_error_bound: lambda <= 0");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return 16.0 * delta * delta / (pi2 * c_lower_at_lambda * lambda * lambda);
}

double choose_delta(double eps_target, double lambda_min, double c_lb) {
  if (!(eps_target > 0.0) || !(lambda_min > 0.0) || !(c_lb > 0.0))
    throw std::invalid_argument("choose_delta: arguments must be positive");
  return std::numbers::pi * lambda_min * std::sqrt(c_lb * eps_target) / 4.0;
}

LambdaRange lambda_range(double c_lb) {
  if (!(c_lb > 0.0)) throw std::invalid_argument("lambda_range: c_lb must be positive");
  return {0.5 * c_lb, 2.0 / c_lb};
}

double lambda_grid_term(double c_best, std::pair<double, double> lambda_star_bracket,
                        double lambda_step) {
  if (!(lambda_step > 0.0)) return 0.0;
  const auto [lo, hi] = lambda_star_bracket;
  const double centre = 0.5 * (lo + hi);
  const double lipschitz = 0.5 * lambda_step;
  double factor = 1.0;
  for (double star : {lo, hi}) {
    if (!(star > 0.0)) return lipschitz;
    factor = std::max(factor, 0.5 * (star / centre + centre / star));
  }
  return std::min(lipschitz, c_best * (factor - 1.0));
}

RadiusBound support_radius_bound(const WeightNorms& wn, double c_lb, RadiusMode mode) {
  if (!(c_lb > 0.0)) throw std::invalid_argument("support_radius_bound: c_lb must be positive");
  const double ratio = wn.l1 / c_lb;
  RadiusBound coarse{2.0 * ratio * ratio, RadiusMode::coarse,
                     fmt::format("coarse bound a <= 2 |w|_1^2 / c^2 at c = {:.17g}", c_lb)};
  if (mode == RadiusMode::coarse) return coarse;

  const double excess = 4.0 * wn.l2_squared / (c_lb * c_lb) - 3.0;
  if (!(excess > 0.0)) {
    coarse.note += "; fine bound unavailable (4 |w|_2^2 / c^2 - 3 <= 0)";
    return coarse;
  }
  const double s = 1.0 / std::sqrt(excess);
  // a <= 2 (|w|_1 / c - sqrt(a/2) s)^2 with the bracket nonnegative; the right
  // side decreases in a, so a - rhs(a) has a single root.
  auto gap = [&](double a) {
    const double inner = ratio - std::sqrt(0.5 * a) * s;
    return a - 2.0 * inner * inner;
  };
  double lo = 0.0, hi = 2.0 * (ratio / s) * (ratio / s);
  hi = std::min(hi, coarse.radius);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) <= 0.0 ? lo : hi) = mid;
  }
  return {lo, RadiusMode::fine,
          fmt::format("fine bound from the squared Euler-Lagrange identity at c = {:.17g}",
                      c_lb)};
}

double snap_radius(double radius, double delta) {
  if (!(radius > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("snap_radius: radius and delta must be positive");
  const double cells = std::max(1.0, std::ceil(radius / delta - 1e-9));
  return cells * delta;
}

double bootstrap_lower_bound(const Weight& w) {
  constexpr double delta = 0.05;
  constexpr double radius = 2.0;
  const DiscretizedKernel kernel =
      build_kernel(w, delta, StepFunction::cell_count(delta, radius));
  SpectralOptions opts;
  opts.mode = ScanMode::full;
  opts.record_scan = false;
  return solve_c_lambda_delta(kernel, MixedNormParams::make(1.0, radius), opts).c_lambda_delta;
}

namespace {

std::vector<SpectralSolution> solve_grid(const DiscretizedKernel& kernel, double radius,
                                         const std::vector<double>& lambdas,
                                         const SweepConfig& cfg, std::size_t first_hint) {
  std::vector<SpectralSolution> out(lambdas.size());
  const std::size_t chunk = std::max<std::size_t>(cfg.chunk, 1);
  const std::size_t chunks = (lambdas.size() + chunk - 1) / chunk;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        SpectralOptions opts = cfg.spectral;
        opts.mode = cfg.scan;
        opts.hint_cells = c == 0 ? first_hint : 0;
        const std::size_t end = std::min(lambdas.size(), (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
          out[i] = solve_c_lambda_delta(kernel, MixedNormParams::make(lambdas[i], radius), opts);
          opts.hint_cells = out[i].support_cells;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
        return;
      }
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(chunks, 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

LambdaPoint make_point(const SpectralSolution& s, int pass, double step, double delta) {
  LambdaPoint p;
  p.lambda = s.lambda;
  p.pass = pass;
  p.c = s.c_lambda_delta;
  p.mu = s.mu;
  p.residual = s.residual;
  p.cells = s.support_cells;
  p.feasible = s.feasible;
  p.converged = s.converged;
  p.near_degenerate = s.near_degenerate;
  p.iterations = s.iterations;
  p.scan = s.scan;
  p.discretization = discretization_error_bound(s.c_lambda_delta, s.lambda, delta);
  const double core = s.upper_value() + p.discretization;
  p.grid_slack = lambda_grid_term(core, {s.lambda - 0.5 * step, s.lambda + 0.5 * step}, step);
  p.upper = core + p.grid_slack;
  return p;
}

}  // namespace

BoundsReport sweep(const Weight& weight, const SweepConfig& cfg) {
  if (!(cfg.lambda_step > 0.0)) throw std::invalid_argument("sweep: lambda_step must be positive");
  BoundsReport rep;
  rep.weight = weight.descriptor();

  rep.c_lb = cfg.c_lb_prior;
  rep.c_lb_source = "prior";
  if (!(rep.c_lb > 0.0)) {
    rep.c_lb = bootstrap_lower_bound(weight);
    rep.c_lb_source = "bootstrap (lambda = 1, delta = 0.05)";
  }

  LambdaRange range{cfg.lambda_lo, cfg.lambda_hi};
  if (!(range.lo > 0.0) || !(range.hi > 0.0)) range = lambda_range(rep.c_lb);
  if (!(range.hi >= range.lo)) throw std::invalid_argument("sweep: empty lambda range");
  rep.lambda_lo = range.lo;
  rep.lambda_hi = range.hi;
  rep.lambda_step = cfg.lambda_step;

  rep.delta = cfg.delta;
  if (!(rep.delta > 0.0)) {
    if (!(cfg.eps_target > 0.0))
      throw std::invalid_argument("sweep: give either delta or eps_target");
    rep.delta = choose_delta(cfg.eps_target, range.lo, rep.c_lb);
  }

  const WeightNorms wn = weight.norms();
  const RadiusBound rb = support_radius_bound(wn, rep.c_lb, cfg.radius_mode);
  rep.radius_bound = rb.radius;
  rep.radius_mode = rb.used;
  double radius = rb.radius;
  std::string radius_note = rb.note;
  if (cfg.radius > 0.0) {
    radius = cfg.radius;
    radius_note = fmt::format("user radius {:.17g} ({})", cfg.radius, rb.note);
  }
  rep.radius = snap_radius(radius, rep.delta);
  rep.error_terms.radius_note =
      radius_note +
      "; extremizers are assumed supported in [-a, a], no truncation term is added";

  const std::size_t n = StepFunction::cell_count(rep.delta, rep.radius);
  const DiscretizedKernel kernel = build_kernel(weight, rep.delta, n);

  std::vector<double> lambdas;
  const auto steps = static_cast<std::size_t>(std::ceil((range.hi - range.lo) / cfg.lambda_step - 1e-9));
  for (std::size_t i = 0; i <= steps; ++i)
    lambdas.push_back(range.lo + static_cast<double>(i) * cfg.lambda_step);

  std::vector<SpectralSolution> sols = solve_grid(kernel, rep.radius, lambdas, cfg, 0);
  for (const auto& s : sols) rep.per_lambda.push_back(make_point(s, 0, cfg.lambda_step, rep.delta));

  auto best_lower = [&] {
    std::size_t g = 0;
    for (std::size_t i = 1; i < rep.per_lambda.size(); ++i)
      if (rep.per_lambda[i].c > rep.per_lambda[g].c) g = i;
    return g;
  };

  std::size_t g = best_lower();
  const double fine_step = cfg.lambda_step / 10.0;
  if (cfg.refine && lambdas[g] - 15.5 * fine_step > 0.0) {
    std::vector<double> fine;
    for (int j = -15; j <= 15; ++j) fine.push_back(lambdas[g] + j * fine_step);
    SweepConfig local = cfg;
    local.workers = 1;
    local.chunk = fine.size();
    std::vector<SpectralSolution> fsols =
        solve_grid(kernel, rep.radius, fine, local, sols[g].support_cells);
    for (std::size_t i = (g == 0 ? 0 : g - 1); i <= std::min(g + 1, sols.size() - 1); ++i)
      rep.per_lambda[i].covers = false;
    for (const auto& s : fsols) {
      rep.per_lambda.push_back(make_point(s, 1, fine_step, rep.delta));
      sols.push_back(s);
    }
    g = best_lower();
  }

  const LambdaPoint& star = rep.per_lambda[g];
  rep.lower = star.c;
  rep.lambda_star = star.lambda;

  const LambdaPoint* top = nullptr;
  for (const auto& p : rep.per_lambda) {
    if (!p.covers) continue;
    if (!top || p.upper > top->upper) top = &p;
    rep.infeasible_points += p.feasible ? 0 : 1;
    rep.unconverged_points += p.converged ? 0 : 1;
    rep.degenerate_points += p.near_degenerate ? 1 : 0;
  }
  rep.upper = top->upper;
  rep.lambda_upper = top->lambda;
  rep.error_terms.discretization = top->discretization;
  rep.error_terms.lambda_grid = top->grid_slack;
  rep.error_terms.eigen_residual = top->residual;

  const StepFunction& block = sols[g].extremizer;
  rep.extremizer_cells = block.size();
  const bool same_parity = (n - block.size()) % 2 == 0;
  rep.extremizer = zero_pad(block, same_parity ? rep.radius : rep.radius + 0.5 * rep.delta);
  const StepNorms en = norms(block);
  rep.l1_over_l2 = en.l2 > 0.0 ? en.l1 / en.l2 : 0.0;
  return rep;
}

}  // namespace autocorr
