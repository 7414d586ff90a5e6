#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace autocorr::testing {

namespace {

std::vector<double> split(double lo, double hi, const std::vector<double>& cuts) {
  std::vector<double> pts{lo, hi};
  for (double c : cuts)
    if (c > lo && c < hi) pts.push_back(c);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

double kernel_oracle(const Weight& w, double delta, double s, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_oracle: tol must be positive");
  std::vector<double> bps = w.breakpoints();
  // w(y - x) as a function of x jumps where y - x hits a breakpoint.
  auto inner = [&](double y) {
    std::vector<double> cuts;
    for (double b : bps) cuts.push_back(y - b);
    const auto pts = split(0.0, delta, cuts);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      sum += boost::math::quadrature::gauss<double, 30>::integrate(
          [&](double x) { return w(y - x); }, pts[i], pts[i + 1]);
    return sum;
  };
  std::vector<double> outer_cuts;
  for (double b : bps) {
    outer_cuts.push_back(b);
    outer_cuts.push_back(b + delta);
  }
  const auto pts = split(s, s + delta, outer_cuts);
  double total = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += GK::integrate(inner, pts[i], pts[i + 1], 12, tol);
  return total / (delta * delta);
}

bool oracle_feasible(std::span<const double> v, double tol) {
  if (v.empty()) return false;
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (peak == 0.0) return false;
  const double slack = tol * peak;
  const std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (v[i] < -slack) return false;
    if (std::abs(v[i] - v[m - 1 - i]) > slack) return false;
  }
  for (std::size_t i = 0; i + 1 < (m + 1) / 2; ++i)
    if (v[i] > v[i + 1] + slack) return false;
  return true;
}

DenseBlock dense_block(const DiscretizedKernel& kernel, double lambda, std::size_t cells,
                       double feasibility_tol, Subspace space) {
  const auto m = static_cast<Eigen::Index>(cells);
  const double d = kernel.delta;
  Eigen::MatrixXd a(m, m), b(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      a(i, j) = 2.0 * d * d * kernel.at(i - j);
      b(i, j) = d * d / lambda + (i == j ? lambda * d : 0.0);
    }
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(m, m);
  if (space == Subspace::even) {
    basis = Eigen::MatrixXd::Zero(m, (m + 1) / 2);
    for (Eigen::Index i = 0; i < (m + 1) / 2; ++i) {
      basis(i, i) = 1.0;
      basis(m - 1 - i, i) = 1.0;
    }
  }
  const Eigen::MatrixXd ra = basis.transpose() * a * basis;
  const Eigen::MatrixXd rb = basis.transpose() * b * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ra, rb);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolve failed");
  const Eigen::Index top = ra.rows() - 1;
  DenseBlock out;
  out.cells = cells;
  out.mu = es.eigenvalues()(top);
  Eigen::VectorXd v = basis * es.eigenvectors().col(top);
  if (v.sum() < 0.0) v = -v;
  out.vector.assign(v.data(), v.data() + m);
  out.feasible = oracle_feasible(out.vector, feasibility_tol);
  return out;
}

DenseMax dense_constrained_max(const DiscretizedKernel& kernel, double lambda, std::size_t n,
                               double feasibility_tol, Subspace space) {
  DenseMax out;
  for (std::size_t k = 1; k <= n; ++k) {
    DenseBlock blk = dense_block(kernel, lambda, k, feasibility_tol, space);
    if (blk.feasible && (!out.any_feasible || blk.mu > out.c)) {
      out.c = blk.mu;
      out.cells = k;
      out.any_feasible = true;
    }
    out.blocks.push_back(std::move(blk));
  }
  return out;
}

double dense_top_eigenvalue(const std::vector<double>& a, std::size_t m) {
  const auto n = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd mat(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) mat(i, j) = a[static_cast<std::size_t>(i * n + j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(n - 1);
}

Weight triangle_weight(std::size_t half_samples) {
  std::vector<double> xs, ws;
  const auto h = static_cast<double>(half_samples);
  for (std::size_t i = 0; i <= 2 * half_samples; ++i) {
    const double x = (static_cast<double>(i) - h) / h;
    xs.push_back(x);
    ws.push_back(1.0 - std::abs(x));
  }
  return Weight::tabulated(xs, ws);
}

}  // namespace autocorr::testing
