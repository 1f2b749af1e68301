// Spectral density and autocovariances of a FARIMA spec.
//
// f(lambda) = (sigma2 / 2 pi) |1-e^{i lambda}|^{-2 delta} |psi|^2 / |phi|^2
// with the 1/(2 pi) factor included so that the integral of f over (-pi, pi]
// equals gamma(0).
//
// gamma(j) = 2 int_0^pi f(lambda) cos(j lambda) d lambda, evaluated by
// Gauss-Legendre panels: the interval splits at 0.1, the singular piece
// (0, 0.1] is integrated in u = log(lambda) (truncated at u = -40) to tame
// the lambda^{-2 delta} pole, and every panel is bisected until it spans at
// most ~10 oscillations of cos(maxlag * lambda). The spectral factor is
// evaluated once per node and shared across all lags through the cosine
// three-term recurrence.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "longmem/model.hpp"
#include "longmem/quadrature.hpp"

namespace longmem {

namespace detail {

inline std::complex<double> poly_at(std::span<const double> c,
                                    std::complex<double> s) {
  std::complex<double> v(0.0, 0.0);
  for (std::size_t i = c.size(); i-- > 0;) v = v * s + c[i];
  return v;
}

// Node-level evaluator with the polynomials hoisted out of the loop.
struct SpectralEvaluator {
  double sigma2;
  double delta;
  std::vector<double> phi, psi;
  bool pure_fractional;

  explicit SpectralEvaluator(const ModelSpec& spec)
      : sigma2(spec.sigma2),
        delta(spec.theta.delta),
        phi(ar_poly(spec.theta.ar)),
        psi(ma_poly(spec.theta.ma)),
        pure_fractional(spec.theta.ar.empty() && spec.theta.ma.empty()) {}

  // f(lambda) * lambda^{2 delta}; finite all the way down to lambda = 0,
  // which lets log-substituted panels fold the lambda^{-2 delta} factor into
  // the exponential weight instead of risking pow() overflow.
  double regularized(double lambda) const {
    double sinc2;  // (2 sin(lambda/2) / lambda)^2
    if (lambda < 1e-4) {
      const double l2 = lambda * lambda;
      sinc2 = 1.0 - l2 / 12.0 + l2 * l2 / 360.0;
    } else {
      const double s = 2.0 * std::sin(0.5 * lambda) / lambda;
      sinc2 = s * s;
    }
    double f = sigma2 / (2.0 * std::numbers::pi) * std::pow(sinc2, -delta);
    if (!pure_fractional) {
      const std::complex<double> s(std::cos(lambda), std::sin(lambda));
      f *= std::norm(poly_at(psi, s)) / std::norm(poly_at(phi, s));
    }
    return f;
  }

  double operator()(double lambda) const {
    return regularized(lambda) * std::pow(lambda, -2.0 * delta);
  }
};

}  // namespace detail

inline double spectral_density(const ModelSpec& spec, double lambda) {
  require_valid(spec);
  if (lambda == 0.0)
    throw std::domain_error("spectral_density: pole at lambda = 0");
  if (!(lambda > -std::numbers::pi - 1e-12 &&
        lambda <= std::numbers::pi + 1e-12))
    throw std::domain_error("spectral_density: lambda outside (-pi, pi]");
  return detail::SpectralEvaluator(spec)(lambda);
}

namespace detail {

struct QuadPanel {
  double a, b;     // endpoints (in u for log panels, in lambda otherwise)
  bool log_scale;  // lambda = e^u substitution
};

// Panels covering (0, pi], refined so cos(maxlag * lambda) stays resolved.
// The log-panel floor scales with 1/(1-2 delta): the pole's mass sits at
// lambda ~ e^{-c/(1-2 delta)}, so a fixed floor would truncate most of
// gamma(0) as delta approaches 1/2.
inline std::vector<QuadPanel> autocov_panels(std::size_t maxlag, double delta) {
  constexpr double split = 0.1;
  const double u_floor = -45.0 / std::max(1.0 - 2.0 * delta, 1e-3);
  const double max_width = maxlag == 0
                               ? std::numbers::pi
                               : 20.0 * std::numbers::pi / double(maxlag);
  std::vector<QuadPanel> out;
  std::vector<QuadPanel> work{{u_floor, std::log(split), true},
                              {split, std::numbers::pi, false}};
  while (!work.empty()) {
    QuadPanel p = work.back();
    work.pop_back();
    const double width =
        p.log_scale ? std::exp(p.b) - std::exp(p.a) : p.b - p.a;
    if (width > max_width) {
      const double m = 0.5 * (p.a + p.b);
      work.push_back({p.a, m, p.log_scale});
      work.push_back({m, p.b, p.log_scale});
    } else {
      out.push_back(p);
    }
  }
  return out;
}

// Appends (lambda_k, w_k) with w_k = weight * jacobian * f(lambda_k) for all
// nodes of all panels. Log panels fold the pole into e^{(1-2 delta) u} and
// use the regularized spectral factor, which stays finite at lambda = 0.
inline void gather_weighted_nodes(const std::vector<QuadPanel>& panels,
                                  const GaussLegendreRule& rule,
                                  const SpectralEvaluator& f,
                                  std::vector<double>& lam,
                                  std::vector<double>& wf) {
  for (const auto& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double t = mid + half * rule.x[i];
      if (p.log_scale) {
        const double lambda = std::exp(t);
        lam.push_back(lambda);
        wf.push_back(rule.w[i] * half *
                     std::exp((1.0 - 2.0 * f.delta) * t) * f.regularized(lambda));
      } else {
        lam.push_back(t);
        wf.push_back(rule.w[i] * half * f(t));
      }
    }
  }
}

}  // namespace detail

// gamma(0..maxlag) by panel quadrature.
inline std::vector<double> autocovariance(const ModelSpec& spec,
                                          std::size_t maxlag,
                                          int nodes_per_panel = 256) {
  require_valid(spec);
  const detail::SpectralEvaluator f(spec);
  const auto panels = detail::autocov_panels(maxlag, spec.theta.delta);
  const auto& rule = gauss_legendre(nodes_per_panel);

  std::vector<double> lam, wf;
  lam.reserve(panels.size() * rule.x.size());
  wf.reserve(panels.size() * rule.x.size());
  detail::gather_weighted_nodes(panels, rule, f, lam, wf);

  // gamma(j) = 2 sum_nodes wf cos(j lambda) via the cosine recurrence
  std::vector<double> gamma(maxlag + 1, 0.0);
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double c1 = std::cos(lam[i]);
    double ck_minus = 1.0;
    double ck = c1;
    gamma[0] += wf[i];
    if (maxlag >= 1) gamma[1] += wf[i] * c1;
    for (std::size_t j = 2; j <= maxlag; ++j) {
      const double next = 2.0 * c1 * ck - ck_minus;
      ck_minus = ck;
      ck = next;
      gamma[j] += wf[i] * ck;
    }
  }
  for (auto& g : gamma) g *= 2.0;

  // convergence check: gamma(0) against a doubled rule
  double g0_fine = 0.0;
  {
    std::vector<double> lam2, wf2;
    detail::gather_weighted_nodes(panels, gauss_legendre(2 * nodes_per_panel),
                                  f, lam2, wf2);
    for (double w : wf2) g0_fine += w;
    g0_fine *= 2.0;
  }
  if (!(std::abs(g0_fine - gamma[0]) <=
        1e-8 * std::max(1.0, std::abs(gamma[0]))))
    throw std::runtime_error(
        "autocovariance: quadrature failed to converge (gamma(0) moved by " +
        std::to_string(std::abs(g0_fine - gamma[0])) + " under refinement)");
  return gamma;
}

}  // namespace longmem
