// Limiting covariance machinery: the information-type matrix Omega, standard
// errors and 95% confidence intervals.
//
// Omega is the second-moment matrix of the complex log-gradient of the
// transfer function,
//
//   omega(lambda) = d/dtheta log alpha(e^{i lambda}; theta),
//   Omega = (1/pi) int_0^pi Re[ omega conj(omega)' ] dlambda,
//
// whose components are available in closed form:
//   delta coordinate: log(1 - e^{i lambda})
//   phi_i coordinate: -e^{i i lambda} / phi(e^{i lambda})
//   psi_i coordinate: -e^{i i lambda} / psi(e^{i lambda})
// For the pure fractional model the delta entry is pi^2/6 independently of
// delta, and sqrt(n) (theta_hat - theta) has limiting covariance Omega^{-1}.
//
// The delta row's integrand grows like log^2(lambda) near zero, so the
// quadrature splits at 0.1 and integrates the inner piece in u = log(lambda),
// truncated at u = -40 (the omitted mass is O(e^{-40} u^2)). 512 nodes per
// panel by default; the returned matrix uses a doubled rule and reports the
// change as quad_error_estimate.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "longmem/model.hpp"
#include "longmem/quadrature.hpp"
#include "longmem/spectrum.hpp"

namespace longmem {

// The printed score integrand: delta entry log|1-e^{i lambda}|^2, remaining
// entries -2 d/dtheta log|phi(e^{i lambda})/psi(e^{i lambda})|. Only the
// real parts appear here; information_matrix integrates the phase-complete
// outer product, which this vector determines up to the phase term.
inline Eigen::VectorXd score_vector_integrand(const ParamVector& theta,
                                              double lambda) {
  if (lambda == 0.0)
    throw std::domain_error("score_vector_integrand: singular at lambda = 0");
  if (!(lambda > 0.0 && lambda <= std::numbers::pi))
    throw std::domain_error("score_vector_integrand: lambda outside (0, pi]");
  const int p = int(theta.ar.size()), q = int(theta.ma.size());
  Eigen::VectorXd g(p + q + 1);
  const double sh = std::sin(0.5 * lambda);
  g(0) = std::log(4.0 * sh * sh);
  const std::complex<double> s(std::cos(lambda), std::sin(lambda));
  const auto phi = detail::ar_poly(theta.ar);
  const auto psi = detail::ma_poly(theta.ma);
  const auto phival = detail::poly_at(phi, s);
  const auto psival = detail::poly_at(psi, s);
  std::complex<double> spow = s;
  for (int i = 1; i <= p; ++i, spow *= s)
    g(i) = 2.0 * std::real(spow / phival);  // -2 d log|phi|/dphi_i = 2 Re s^i/phi
  spow = s;
  for (int i = 1; i <= q; ++i, spow *= s)
    g(p + i) = 2.0 * std::real(spow / psival);
  return g;
}

struct InformationMatrix {
  Eigen::MatrixXd omega;
  int quad_nodes = 0;
  double quad_error_estimate = 0.0;
};

namespace detail {

// complex log-gradient of alpha at e^{i lambda}
inline void log_gradient(const ParamVector& theta,
                         const std::vector<double>& phi,
                         const std::vector<double>& psi, double lambda,
                         Eigen::VectorXcd& omega) {
  const int p = int(theta.ar.size()), q = int(theta.ma.size());
  const double sh = std::sin(0.5 * lambda);
  // log(1 - e^{i lambda}) = log|2 sin(lambda/2)| + i arg, arg = (lambda-pi)/2
  omega(0) = std::complex<double>(std::log(2.0 * std::abs(sh)),
                                  0.5 * (lambda - std::numbers::pi));
  const std::complex<double> s(std::cos(lambda), std::sin(lambda));
  const auto phival = poly_at(phi, s);
  const auto psival = poly_at(psi, s);
  std::complex<double> spow = s;
  for (int i = 1; i <= p; ++i, spow *= s) omega(i) = -spow / phival;
  spow = s;
  for (int i = 1; i <= q; ++i, spow *= s) omega(p + i) = -spow / psival;
}

inline Eigen::MatrixXd omega_quadrature(const ParamVector& theta,
                                        int nodes_per_panel) {
  const int d = theta.dim();
  const auto phi = ar_poly(theta.ar);
  const auto psi = ma_poly(theta.ma);
  const auto& rule = gauss_legendre(nodes_per_panel);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXcd om(d);

  struct Panel {
    double a, b;
    bool log_scale;
  };
  const Panel panels[2] = {{-40.0, std::log(0.1), true},
                           {0.1, std::numbers::pi, false}};
  for (const auto& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double t = mid + half * rule.x[i];
      const double lambda = p.log_scale ? std::exp(t) : t;
      const double jac = p.log_scale ? lambda : 1.0;
      log_gradient(theta, phi, psi, lambda, om);
      const double w = rule.w[i] * half * jac;
      for (int r = 0; r < d; ++r)
        for (int c = r; c < d; ++c)
          acc(r, c) += w * std::real(om(r) * std::conj(om(c)));
    }
  }
  acc /= std::numbers::pi;
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < r; ++c) acc(r, c) = acc(c, r);
  return acc;
}

}  // namespace detail

inline InformationMatrix information_matrix(const ParamVector& theta,
                                            int nodes_per_panel = 512) {
  require_valid(theta);
  const Eigen::MatrixXd coarse = detail::omega_quadrature(theta, nodes_per_panel);
  const Eigen::MatrixXd fine = detail::omega_quadrature(theta, 2 * nodes_per_panel);
  InformationMatrix info;
  info.omega = fine;
  info.quad_nodes = 2 * nodes_per_panel;
  info.quad_error_estimate = (fine - coarse).cwiseAbs().maxCoeff();
  if (!(info.quad_error_estimate <= 1e-6))
    throw std::runtime_error("information_matrix: quadrature error estimate " +
                             std::to_string(info.quad_error_estimate) +
                             " above tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info.omega);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error(
        "information_matrix: matrix is not positive definite");
  return info;
}

// se_i = sqrt((Omega^{-1})_{ii} / n)
inline std::vector<double> standard_errors(const InformationMatrix& info,
                                           std::size_t n) {
  if (n == 0) throw std::invalid_argument("standard_errors: n must be positive");
  const Eigen::Index d = info.omega.rows();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info.omega);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw std::runtime_error("standard_errors: omega is singular");
  const Eigen::MatrixXd inv =
      ldlt.solve(Eigen::MatrixXd::Identity(d, d));
  std::vector<double> se(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const double v = inv(i, i) / double(n);
    if (!(v > 0.0))
      throw std::runtime_error("standard_errors: nonpositive variance entry");
    se[std::size_t(i)] = std::sqrt(v);
  }
  return se;
}

inline constexpr double kNormal975 = 1.959964;

inline std::vector<std::pair<double, double>> ci95(
    const std::vector<double>& theta_hat, const std::vector<double>& se) {
  if (theta_hat.size() != se.size())
    throw std::invalid_argument("ci95: size mismatch");
  std::vector<std::pair<double, double>> out(theta_hat.size());
  for (std::size_t i = 0; i < se.size(); ++i)
    out[i] = {theta_hat[i] - kNormal975 * se[i],
              theta_hat[i] + kNormal975 * se[i]};
  return out;
}

}  // namespace longmem
