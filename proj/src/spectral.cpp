#include "autocorr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "autocorr/toeplitz.hpp"

namespace autocorr {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<double> triangular_bump(std::size_t m) {
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = static_cast<double>(std::min(i + 1, m - i));
  return v;
}

struct Evaluation {
  double mu = 0.0;
  bool feasible = false;
  bool clipped_feasible = false;
  double certified = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

double certified_quotient(const DiscretizedKernel& kernel, const StepFunction& f,
                          double lambda) {
  const MixedNormParams q = MixedNormParams::make(lambda, f.radius);
  const double h = h_lambda_norm_sq(f, q);
  if (!(h > 0.0)) return 0.0;
  return 2.0 * quadratic_form(kernel, f, f) / h;
}

StepFunction clipped(StepFunction f) {
  for (double& v : f.values) v = std::max(v, 0.0);
  return f;
}

}  // namespace

PowerResult power_iterate(const LinearOperator& op, std::vector<double> start,
                          const PowerOptions& opts) {
  const std::size_t m = start.size();
  PowerResult out;
  if (m == 0) return out;
  const std::size_t max_iter = opts.max_iter ? opts.max_iter : 50 * std::max<std::size_t>(m, 20);

  std::vector<double> g = std::move(start);
  double ng = norm2(g);
  if (!(ng > 0.0)) throw std::invalid_argument("power_iterate: zero start vector");
  for (double& x : g) x /= ng;
  std::vector<double> y(m);

  double mu = 0.0, residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < max_iter) {
    ++it;
    op(g, y);
    mu = dot(g, y);
    double r2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) r2 += (y[i] - mu * g[i]) * (y[i] - mu * g[i]);
    residual = std::sqrt(r2);
    if (residual <= opts.tol) {
      out.converged = true;
      break;
    }
    const double ny = norm2(y);
    if (!(ny > 0.0)) break;
    for (std::size_t i = 0; i < m; ++i) g[i] = y[i] / ny;
  }

  if (!out.converged && residual > 0.0 && std::isfinite(residual)) {
    // Rayleigh-Ritz on span{g, M g} to tell a slow gap from a stall between
    // two (near-)degenerate values.
    op(g, y);
    mu = dot(g, y);
    std::vector<double> q2(m);
    for (std::size_t i = 0; i < m; ++i) q2[i] = y[i] - mu * g[i];
    const double r = norm2(q2);
    if (r > 0.0) {
      for (double& x : q2) x /= r;
      std::vector<double> mq2(m);
      op(q2, mq2);
      const double d = dot(q2, mq2);
      const double mean = 0.5 * (mu + d);
      const double rad = std::hypot(0.5 * (mu - d), r);
      if (2.0 * rad < opts.degenerate_gap) {
        out.near_degenerate = true;
        out.second_candidate = mean - rad;
        mu = mean + rad;
      }
    }
  }

  out.mu = mu;
  out.vector = std::move(g);
  out.iterations = it;
  out.residual = residual;
  return out;
}

BlockEigenpair top_eigenpair(const DiscretizedKernel& kernel, const MixedNormParams& p,
                             std::size_t support_cells, const PowerOptions& opts) {
  if (support_cells == 0) throw std::invalid_argument("top_eigenpair: empty block");
  const double delta = kernel.delta;
  const MixedNormParams q =
      MixedNormParams::make(p.lambda, 0.5 * static_cast<double>(support_cells) * delta);
  ToeplitzConvolver conv(kernel, support_cells);
  std::vector<double> t(support_cells);
  LinearOperator op = [&](std::span<const double> x, std::span<double> y) {
    std::copy(x.begin(), x.end(), t.begin());
    apply_A_inv_inplace(t, delta, q);
    conv.apply(t, y);
    apply_A_inv_inplace(y, delta, q);
    // M commutes with the reflection; iterate on the even part only, so rounding
    // cannot pull in an antisymmetric (never feasible) eigenvector.
    for (std::size_t i = 0, j = y.size() - 1; i < j; ++i, --j) y[i] = y[j] = 0.5 * (y[i] + y[j]);
    for (double& v : y) v *= 2.0;
  };
  PowerResult pr = power_iterate(op, triangular_bump(support_cells), opts);

  BlockEigenpair out;
  out.mu = pr.mu;
  out.converged = pr.converged;
  out.iterations = pr.iterations;
  out.residual = pr.residual;
  out.near_degenerate = pr.near_degenerate;
  out.second_candidate = pr.second_candidate;
  out.f.delta = delta;
  out.f.radius = q.radius;
  out.f.values = std::move(pr.vector);
  apply_A_inv_inplace(out.f.values, delta, q);
  double sum = 0.0;
  for (double v : out.f.values) sum += v;
  const double scale = (sum < 0.0 ? -1.0 : 1.0) / std::sqrt(h_lambda_norm_sq(out.f, q));
  for (double& v : out.f.values) v *= scale;
  return out;
}

bool feasibility_check(std::span<const double> v, double tol) {
  const std::size_t m = v.size();
  if (m == 0) return false;
  const double mx = *std::max_element(v.begin(), v.end());
  if (!(mx > 0.0)) return false;
  const double thr = tol * mx;
  for (double x : v)
    if (x < -thr) return false;
  for (std::size_t i = 0; i < m / 2; ++i)
    if (std::abs(v[i] - v[m - 1 - i]) > thr) return false;
  for (std::size_t i = m / 2; i + 1 < m; ++i)
    if (v[i + 1] > v[i] + thr) return false;
  return true;
}

bool feasibility_check(const StepFunction& v, double tol) {
  return feasibility_check(std::span<const double>(v.values), tol);
}

double SpectralSolution::upper_value() const { return std::max(mu, c_lambda_delta) + residual; }

SpectralSolution solve_c_lambda_delta(const DiscretizedKernel& kernel,
                                      const MixedNormParams& p,
                                      const SpectralOptions& opts) {
  const std::size_t n = StepFunction::cell_count(kernel.delta, p.radius);
  if (kernel.n() < n)
    throw std::invalid_argument(fmt::format(
        "kernel has {} lags but the grid of radius {} needs {}", kernel.n(), p.radius, n));

  PowerOptions power = opts.power;
  if (power.max_iter == 0) power.max_iter = 50 * std::max<std::size_t>(n, 20);

  std::map<std::size_t, Evaluation> seen;
  std::optional<BlockEigenpair> best_feasible, best_fallback, best_any;
  double best_feasible_certified = 0.0, best_fallback_certified = 0.0;

  auto evaluate = [&](std::size_t k) -> const Evaluation& {
    if (auto it = seen.find(k); it != seen.end()) return it->second;
    BlockEigenpair pair = top_eigenpair(kernel, p, k, power);
    Evaluation e;
    e.mu = pair.mu;
    e.iterations = pair.iterations;
    e.converged = pair.converged;
    e.feasible = feasibility_check(pair.f, opts.feasibility_tol);
    StepFunction fc = clipped(pair.f);
    e.clipped_feasible = e.feasible || feasibility_check(fc, opts.feasibility_tol);
    if (e.clipped_feasible) e.certified = certified_quotient(kernel, fc, p.lambda);
    if (e.feasible && (!best_feasible || e.mu > best_feasible->mu)) {
      best_feasible_certified = e.certified;
      best_feasible = pair;
      best_feasible->f = fc;
    } else if (!e.feasible && e.clipped_feasible &&
               (!best_fallback || e.certified > best_fallback_certified)) {
      best_fallback_certified = e.certified;
      best_fallback = pair;
      best_fallback->f = fc;
    }
    if (!best_any || e.mu > best_any->mu) best_any = std::move(pair);
    return seen.emplace(k, e).first->second;
  };
  auto score = [&](std::size_t k) {
    const Evaluation& e = evaluate(k);
    return e.feasible ? e.mu : -std::numeric_limits<double>::infinity();
  };

  if (opts.mode == ScanMode::full) {
    for (std::size_t k = 1; k <= n; ++k) evaluate(k);
  } else {
    std::size_t k0 = std::min(opts.hint_cells, n);
    if (k0 == 0) {
      // Largest feasible block, assuming feasibility is monotone in k; the
      // outward scan below corrects local violations.
      if (evaluate(n).feasible) {
        k0 = n;
      } else {
        std::size_t lo = 1, hi = n;
        while (hi - lo > 1) {
          const std::size_t mid = lo + (hi - lo) / 2;
          (evaluate(mid).feasible ? lo : hi) = mid;
        }
        k0 = lo;
      }
    }
    const double s0 = score(k0);
    double best = s0;
    std::size_t misses = 0;
    for (std::size_t k = k0 + 1; k <= n && misses < opts.patience; ++k) {
      const double s = score(k);
      if (s > best) {
        best = s;
        misses = 0;
      } else {
        ++misses;
      }
    }
    best = s0;
    misses = 0;
    for (std::size_t k = k0; k > 1 && misses < opts.patience; --k) {
      const double s = score(k - 1);
      if (s > best) {
        best = s;
        misses = 0;
      } else {
        ++misses;
      }
    }
  }

  SpectralSolution sol;
  sol.lambda = p.lambda;
  sol.delta = kernel.delta;
  const BlockEigenpair* chosen = nullptr;
  if (best_feasible) {
    chosen = &*best_feasible;
    sol.feasible = true;
    sol.c_lambda_delta = best_feasible_certified;
  } else if (best_fallback) {
    chosen = &*best_fallback;
    sol.feasible = false;
    sol.c_lambda_delta = best_fallback_certified;
  } else {
    throw NoFeasibleSupport(
        fmt::format("no feasible support block at lambda = {} (best mu {:.17g})", p.lambda,
                    best_any ? best_any->mu : 0.0),
        best_any ? *best_any : BlockEigenpair{});
  }
  sol.mu = chosen->mu;
  sol.extremizer = chosen->f;
  sol.support_cells = chosen->f.size();
  sol.iterations = chosen->iterations;
  sol.residual = chosen->residual;
  sol.converged = chosen->converged;
  sol.near_degenerate = chosen->near_degenerate;
  if (opts.record_scan) {
    sol.scan.reserve(seen.size());
    for (const auto& [k, e] : seen)
      sol.scan.push_back({k, e.mu, e.feasible, e.iterations, e.converged});
  }
  return sol;
}

}  // namespace autocorr
