// Conditional-sum-of-squares estimation.
//
// Residual filter e_t(theta) = sum_{j=0}^{t-1} alpha_j(theta) x_{t-j},
// objective s_n(theta) = (1/n) sum e_t^2, analytic gradient through
// h_t = sum_{j=1}^{t-1} zeta_j x_{t-j}, Hessian by central differences of the
// gradient, and a deterministic multi-start bounded BFGS minimizer that
// reports plug-in standard errors from the information matrix.
//
// The minimizer standardizes the series by its root mean square before
// optimizing. The argmin is unaffected (s_n scales quadratically) and
// estimates become exactly invariant under power-of-two rescalings of the
// data; sigma2_hat is reported on the original scale.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "longmem/asymptotics.hpp"
#include "longmem/model.hpp"
#include "longmem/optimizer.hpp"
#include "longmem/series.hpp"
#include "longmem/timeseries.hpp"

namespace longmem {

namespace detail {

inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// out_t = sum_{j=0}^{t-1} coef_j x_{t-j} for t = 1..n (0-based in code).
// coef must have at least n entries. The series is reversed once so every
// output is a contiguous dot product.
inline std::vector<double> triangular_filter(std::span<const double> coef,
                                             std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> xr(n), out(n);
  for (std::size_t i = 0; i < n; ++i) xr[i] = x[n - 1 - i];
  for (std::size_t i = 0; i < n; ++i)
    out[i] = dot(coef.data(), xr.data() + (n - 1 - i), i + 1);
  return out;
}

inline double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / double(x.size());
}

inline double rms_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return x.empty() ? 0.0 : std::sqrt(s / double(x.size()));
}

}  // namespace detail

inline std::vector<double> css_residuals(const ParamVector& theta,
                                         std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("css_residuals: empty series");
  const auto alpha = ar_coefficients(theta, x.size() - 1);
  return detail::triangular_filter(alpha, x);
}

inline double css_objective(const ParamVector& theta,
                            std::span<const double> x) {
  const auto e = css_residuals(theta, x);
  double s = 0.0;
  for (double v : e) s += v * v;
  return s / double(x.size());
}

inline std::vector<double> css_gradient(const ParamVector& theta,
                                        std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("css_gradient: empty series");
  const std::size_t n = x.size();
  const auto e = css_residuals(theta, x);
  const auto zeta = zeta_coefficients(theta, n - 1);
  std::vector<double> r(zeta.size());
  for (std::size_t c = 0; c < zeta.size(); ++c) {
    const auto h = detail::triangular_filter(zeta[c], x);
    r[c] = 2.0 / double(n) * detail::dot(h.data(), e.data(), n);
  }
  return r;
}

// r_n*(theta0) = (2/n) sum h_t(theta0) eps_t; requires the true innovation
// record, so only truncated-MA simulations qualify.
inline std::vector<double> idealized_score(const ParamVector& theta0,
                                           const TimeSeries& ts) {
  if (ts.innovations_kind != InnovationsKind::exact ||
      ts.innovations.size() != ts.values.size())
    throw std::invalid_argument(
        "idealized_score: series lacks an exact innovation record");
  const std::size_t n = ts.n();
  const auto zeta = zeta_coefficients(theta0, n - 1);
  std::vector<double> r(zeta.size());
  for (std::size_t c = 0; c < zeta.size(); ++c) {
    const auto h = detail::triangular_filter(zeta[c], ts.values);
    r[c] = 2.0 / double(n) * detail::dot(h.data(), ts.innovations.data(), n);
  }
  return r;
}

// Symmetric finite-difference Hessian of s_n from the analytic gradient.
inline Eigen::MatrixXd css_hessian(const ParamVector& theta,
                                   std::span<const double> x,
                                   double rel_step = 1e-5) {
  const int d = theta.dim();
  const ModelOrder order = theta.order();
  const auto flat = theta.flatten();
  Eigen::MatrixXd h(d, d);
  for (int c = 0; c < d; ++c) {
    const double step = rel_step * std::max(1.0, std::abs(flat[std::size_t(c)]));
    auto up = flat, dn = flat;
    up[std::size_t(c)] += step;
    dn[std::size_t(c)] -= step;
    const auto gu = css_gradient(ParamVector::from_flat(order, up), x);
    const auto gd = css_gradient(ParamVector::from_flat(order, dn), x);
    for (int r = 0; r < d; ++r)
      h(r, c) = (gu[std::size_t(r)] - gd[std::size_t(r)]) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

struct EstimationResult {
  ParamVector theta_hat;
  double sigma2_hat = 0.0;
  double objective = 0.0;      // s_n(theta_hat) on the original scale
  double gradient_norm = 0.0;  // inf norm at theta_hat (standardized scale)
  Eigen::MatrixXd omega_hat;
  std::vector<double> std_errors;
  std::vector<std::pair<double, double>> ci95;
  int iterations = 0;
  bool converged = false;
  int starts = 0;
  std::string estimator;
  std::size_t n = 0;
};

struct MinimizeOptions {
  std::optional<ParamBounds> bounds;
  std::vector<ParamVector> starts;  // appended to the default start grid
  bool mean_correct = false;
  BfgsOptions bfgs;
  double converged_grad_tol = 1e-6;
};

inline std::vector<ParamVector> default_starts(const ModelOrder& order) {
  std::vector<ParamVector> starts;
  for (double d : {0.1, 0.25, 0.4}) {
    ParamVector theta;
    theta.delta = d;
    theta.ar.assign(std::size_t(order.p), 0.0);
    theta.ma.assign(std::size_t(order.q), 0.0);
    starts.push_back(std::move(theta));
  }
  return starts;
}

namespace detail {

// Shared multi-start driver for the CSS and Whittle objectives. The
// objective sees standardized data through `eval`; callers finalize scale-
// dependent fields afterwards.
template <typename Eval>
EstimationResult minimize_multistart(const ModelOrder& order,
                                     const MinimizeOptions& opts,
                                     std::size_t n, Eval&& eval) {
  const ParamBounds bounds =
      opts.bounds ? *opts.bounds : ParamBounds::defaults(order);
  auto starts = default_starts(order);
  for (const auto& s : opts.starts) {
    if (s.order() != order)
      throw std::invalid_argument("minimize: start has wrong order");
    starts.push_back(s);
  }

  BoxedObjective objective = [&](const std::vector<double>& flat,
                                 std::vector<double>* grad) -> double {
    const ParamVector theta = ParamVector::from_flat(order, flat);
    if (order.p + order.q > 1 && !validate(theta).ok())
      return std::numeric_limits<double>::infinity();
    return eval(theta, grad);
  };

  const BoxedBfgs solver(bounds.flatten(), opts.bfgs);
  std::optional<BfgsOutcome> best;
  for (const auto& s : starts) {
    const auto out = solver.minimize(objective, s.flatten());
    if (!best) {
      best = out;
      continue;
    }
    const double tol = 1e-12;
    if (out.value < best->value - tol ||
        (std::abs(out.value - best->value) <= tol &&
         std::lexicographical_compare(out.theta.begin(), out.theta.end(),
                                      best->theta.begin(), best->theta.end())))
      best = out;
  }

  EstimationResult res;
  res.theta_hat = ParamVector::from_flat(order, best->theta);
  res.gradient_norm = 0.0;
  for (double g : best->gradient)
    res.gradient_norm = std::max(res.gradient_norm, std::abs(g));
  res.iterations = best->iterations;
  res.converged = best->converged || res.gradient_norm < opts.converged_grad_tol;
  res.starts = int(starts.size());
  res.n = n;
  return res;
}

}  // namespace detail

inline EstimationResult css_estimate(const ModelOrder& order,
                                     std::span<const double> x,
                                     const MinimizeOptions& opts = {}) {
  if (x.size() < 20)
    throw std::invalid_argument("css_estimate: need at least 20 observations");
  std::vector<double> y(x.begin(), x.end());
  if (opts.mean_correct) {
    const double m = detail::mean_of(y);
    for (auto& v : y) v -= m;
  }
  const double scale = detail::rms_of(y);
  std::vector<double> ys = y;
  if (scale > 0.0)
    for (auto& v : ys) v /= scale;

  auto eval = [&](const ParamVector& theta, std::vector<double>* grad) {
    const std::size_t n = ys.size();
    const auto alpha = ar_coefficients(theta, n - 1);
    const auto e = detail::triangular_filter(alpha, ys);
    double s = 0.0;
    for (double v : e) s += v * v;
    s /= double(n);
    if (grad) {
      const auto zeta = zeta_coefficients(theta, n - 1);
      grad->resize(zeta.size());
      for (std::size_t c = 0; c < zeta.size(); ++c) {
        const auto h = detail::triangular_filter(zeta[c], ys);
        (*grad)[c] = 2.0 / double(n) * detail::dot(h.data(), e.data(), n);
      }
    }
    return s;
  };

  EstimationResult res =
      detail::minimize_multistart(order, opts, x.size(), eval);
  res.estimator = "css";
  res.objective = css_objective(res.theta_hat, y);
  res.sigma2_hat = res.objective;

  const auto info = information_matrix(res.theta_hat);
  res.omega_hat = info.omega;
  res.std_errors = standard_errors(info, x.size());
  res.ci95 = ci95(res.theta_hat.flatten(), res.std_errors);
  return res;
}

}  // namespace longmem
