// Integral-form Whittle objective as a rival estimator and comparator.
//
//   s_n+(theta) = c_n(0) xi_0(theta) + 2 sum_{j=1}^{n-1} c_n(j) xi_j(theta)
//   c_n(j)      = (1/n) sum_{t=1}^{n-j} x_t x_{t+j}      (no mean correction)
//   xi_j(theta) = sum_k alpha_k(theta) alpha_{k+j}(theta)
//
// xi tables truncate the k-sum at J_xi (default 10 n) and refine by doubling
// until the remaining tail is below xi_tail_tol. The tail estimate is
// 2 sum_{k in (J/2, J]} alpha_k^2: coefficient moduli are eventually
// decreasing, so lagged products are dominated by the squares and successive
// dyadic blocks shrink by at least 2^{-(2 delta + 1)} < 1/2, making twice the
// last computed block an upper bound on everything beyond J.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "longmem/css.hpp"
#include "longmem/fft.hpp"
#include "longmem/model.hpp"
#include "longmem/series.hpp"

namespace longmem {

// Exact direct sums; quadratic cost, reference path.
inline std::vector<double> sample_autocovariances_direct(
    std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("sample_autocovariances: empty series");
  std::vector<double> c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t + j < n; ++t) s += x[t] * x[t + j];
    c[j] = s / double(n);
  }
  return c;
}

// Transform path: zero-padded autocorrelation, O(n log n).
inline std::vector<double> sample_autocovariances_transform(
    std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("sample_autocovariances: empty series");
  auto c = fft::autocorrelation(x, n - 1);
  for (auto& v : c) v /= double(n);
  return c;
}

inline std::vector<double> sample_autocovariances(std::span<const double> x) {
  return x.size() <= 4096 ? sample_autocovariances_direct(x)
                          : sample_autocovariances_transform(x);
}

struct XiOptions {
  std::size_t j_initial = 0;  // 0: use 10 (maxlag + 1)
  std::size_t j_max = std::size_t(1) << 20;
  double tail_tol_rel = 1e-8;  // relative to xi_0
};

struct XiResult {
  std::vector<double> xi;
  std::size_t truncation = 0;
  double tail_estimate = 0.0;
};

inline XiResult xi_coefficients(const ParamVector& theta, std::size_t maxlag,
                                const XiOptions& opts = {}) {
  require_valid(theta);
  std::size_t j = opts.j_initial ? opts.j_initial : 10 * (maxlag + 1);
  j = std::max(j, 2 * (maxlag + 1));
  for (;;) {
    const auto alpha = ar_coefficients(theta, j);
    double block = 0.0;
    for (std::size_t k = j / 2 + 1; k <= j; ++k) block += alpha[k] * alpha[k];
    const double tail = 2.0 * block;
    XiResult res;
    res.xi = fft::autocorrelation(alpha, maxlag);
    res.truncation = j;
    res.tail_estimate = tail;
    const double tol = opts.tail_tol_rel * std::max(res.xi[0], 1e-300);
    if (tail < tol) return res;
    if (j >= opts.j_max)
      throw std::runtime_error(
          "xi_coefficients: tail tolerance unreachable within coefficient budget");
    j = std::min(2 * j, opts.j_max);
  }
}

struct WhittleWorkspace {
  std::vector<double> c;  // c_n(0..n-1)
  std::size_t n = 0;
  XiOptions xi;

  static WhittleWorkspace build(std::span<const double> x,
                                const XiOptions& xi_opts = {}) {
    WhittleWorkspace ws;
    ws.c = sample_autocovariances(x);
    ws.n = x.size();
    ws.xi = xi_opts;
    return ws;
  }
};

inline double whittle_objective(const ParamVector& theta,
                                const WhittleWorkspace& ws) {
  const auto xi = xi_coefficients(theta, ws.n - 1, ws.xi);
  double s = ws.c[0] * xi.xi[0];
  for (std::size_t j = 1; j < ws.n; ++j) s += 2.0 * ws.c[j] * xi.xi[j];
  return s;
}

inline EstimationResult whittle_estimate(const ModelOrder& order,
                                         std::span<const double> x,
                                         const MinimizeOptions& opts = {}) {
  if (x.size() < 20)
    throw std::invalid_argument("whittle_estimate: need at least 20 observations");
  std::vector<double> y(x.begin(), x.end());
  if (opts.mean_correct) {
    const double m = detail::mean_of(y);
    for (auto& v : y) v -= m;
  }
  const double scale = detail::rms_of(y);
  std::vector<double> ys = y;
  if (scale > 0.0)
    for (auto& v : ys) v /= scale;

  const WhittleWorkspace ws = WhittleWorkspace::build(ys);
  const ModelOrder ord = order;

  // value by the quadratic form, gradient by central differences; probes
  // that step over the admissibility edge fall back to a one-sided stencil
  auto probe = [&](const std::vector<double>& flat, double* out) {
    const ParamVector theta = ParamVector::from_flat(ord, flat);
    if (!validate(theta).ok()) return false;
    *out = whittle_objective(theta, ws);
    return true;
  };
  auto eval = [&](const ParamVector& theta, std::vector<double>* grad) {
    const double val = whittle_objective(theta, ws);
    if (grad) {
      const auto flat = theta.flatten();
      grad->resize(flat.size());
      for (std::size_t i = 0; i < flat.size(); ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(flat[i]));
        auto up = flat, dn = flat;
        up[i] += h;
        dn[i] -= h;
        double fu = 0.0, fd = 0.0;
        const bool have_up = probe(up, &fu);
        const bool have_dn = probe(dn, &fd);
        if (have_up && have_dn)
          (*grad)[i] = (fu - fd) / (2.0 * h);
        else if (have_up)
          (*grad)[i] = (fu - val) / h;
        else if (have_dn)
          (*grad)[i] = (val - fd) / h;
        else
          (*grad)[i] = 0.0;
      }
    }
    return val;
  };

  EstimationResult res = detail::minimize_multistart(order, opts, x.size(), eval);
  res.estimator = "whittle";
  res.objective = whittle_objective(res.theta_hat, WhittleWorkspace::build(y));
  res.sigma2_hat = res.objective;

  const auto info = information_matrix(res.theta_hat);
  res.omega_hat = info.omega;
  res.std_errors = standard_errors(info, x.size());
  res.ci95 = ci95(res.theta_hat.flatten(), res.std_errors);
  return res;
}

// Desk-scale proxy for sup_theta |s_n+(theta) - s_n(theta)| over a grid.
inline double objective_gap(std::span<const double> x,
                            const std::vector<ParamVector>& grid) {
  if (grid.empty()) throw std::invalid_argument("objective_gap: empty grid");
  const WhittleWorkspace ws = WhittleWorkspace::build(x);
  double gap = 0.0;
  for (const auto& theta : grid) {
    const double a = whittle_objective(theta, ws);
    const double b = css_objective(theta, x);
    gap = std::max(gap, std::abs(a - b));
  }
  return gap;
}

}  // namespace longmem
