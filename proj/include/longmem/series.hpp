// Power-series coefficient machinery for the FARIMA transfer function
// alpha(s) = (1-s)^delta phi(s)/psi(s):
//
//   fractional_coefficients  coefficients of (1-s)^delta
//   arma_star_expansion      coefficients of phi(s)/psi(s)
//   ar_coefficients          alpha_j
//   ma_coefficients          beta_j with alpha * beta = 1 (series inverse)
//   zeta_coefficients        zeta_j = d alpha_j / d theta, one column per
//                            coordinate (delta first, then AR, then MA)
//
// Everything is computed by exact O(J (p+q)) recursions: short convolution
// with the numerator polynomial followed by synthetic division by the
// denominator. The delta column uses the derivative of the fractional
// recursion itself, so no long convolutions appear on the estimation path.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "longmem/model.hpp"

namespace longmem {

namespace detail {

// Coefficients of (1-s)^d for any real d (no admissibility restriction);
// pi_0 = 1, pi_j = pi_{j-1} (j-1-d)/j.
inline std::vector<double> binomial_series(double d, std::size_t J) {
  std::vector<double> pi(J + 1);
  pi[0] = 1.0;
  for (std::size_t j = 1; j <= J; ++j)
    pi[j] = pi[j - 1] * (double(j) - 1.0 - d) / double(j);
  return pi;
}

// d/dd of binomial_series, again by differentiating the recursion:
// pi'_j = pi'_{j-1} (j-1-d)/j - pi_{j-1}/j.
inline std::vector<double> binomial_series_ddelta(double d, std::size_t J) {
  std::vector<double> pi(J + 1), dpi(J + 1);
  pi[0] = 1.0;
  dpi[0] = 0.0;
  for (std::size_t j = 1; j <= J; ++j) {
    const double a = (double(j) - 1.0 - d) / double(j);
    pi[j] = pi[j - 1] * a;
    dpi[j] = dpi[j - 1] * a - pi[j - 1] / double(j);
  }
  return dpi;
}

// out = out * poly where poly = c_0 + c_1 s + ... (short numerator), done in
// place from the top so no scratch buffer is needed.
inline void multiply_poly_inplace(std::vector<double>& out,
                                  std::span<const double> poly) {
  const std::size_t J = out.size();
  for (std::size_t j = J; j-- > 0;) {
    double s = 0.0;
    const std::size_t kmax = std::min(poly.size() - 1, j);
    for (std::size_t k = 0; k <= kmax; ++k) s += poly[k] * out[j - k];
    out[j] = s;
  }
}

// out = out / poly (synthetic division), poly_0 must be 1.
inline void divide_poly_inplace(std::vector<double>& out,
                                std::span<const double> poly) {
  const std::size_t J = out.size();
  for (std::size_t j = 0; j < J; ++j) {
    const std::size_t kmax = std::min(poly.size() - 1, j);
    double s = out[j];
    for (std::size_t k = 1; k <= kmax; ++k) s -= poly[k] * out[j - k];
    out[j] = s;
  }
}

}  // namespace detail

// Coefficients pi_0..pi_J of (1-s)^delta for delta in the admissible range.
inline std::vector<double> fractional_coefficients(double delta, std::size_t J) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::domain_error("fractional_coefficients: delta must lie in (0, 0.5)");
  if (J < 1) throw std::invalid_argument("fractional_coefficients: J must be >= 1");
  return detail::binomial_series(delta, J);
}

// Coefficients of phi(s)/psi(s) up to s^J.
inline std::vector<double> arma_star_expansion(const ParamVector& theta,
                                               std::size_t J) {
  require_valid(theta);
  std::vector<double> a(J + 1, 0.0);
  const auto phi = detail::ar_poly(theta.ar);
  for (std::size_t j = 0; j < phi.size() && j <= J; ++j) a[j] = phi[j];
  detail::divide_poly_inplace(a, detail::ma_poly(theta.ma));
  return a;
}

// AR(inf) coefficients alpha_0..alpha_J of (1-s)^delta phi(s)/psi(s).
inline std::vector<double> ar_coefficients(const ParamVector& theta,
                                           std::size_t J) {
  require_valid(theta);
  auto alpha = detail::binomial_series(theta.delta, J);
  if (!theta.ar.empty())
    detail::multiply_poly_inplace(alpha, detail::ar_poly(theta.ar));
  if (!theta.ma.empty())
    detail::divide_poly_inplace(alpha, detail::ma_poly(theta.ma));
  return alpha;
}

// Series inverse: beta with beta_0 = 1 and alpha * beta = (1, 0, 0, ...).
inline std::vector<double> ma_coefficients(std::span<const double> alpha) {
  if (alpha.empty() || alpha[0] != 1.0)
    throw std::invalid_argument("ma_coefficients: alpha must start with 1");
  std::vector<double> beta(alpha.size());
  beta[0] = 1.0;
  for (std::size_t j = 1; j < alpha.size(); ++j) {
    double s = 0.0;
    for (std::size_t k = 1; k <= j; ++k) s += alpha[k] * beta[j - k];
    beta[j] = -s;
  }
  return beta;
}

// MA(inf) coefficients straight from the model, beta = (1-s)^{-delta} psi/phi.
// Agrees with the series inverse of ar_coefficients but costs O(J (p+q)),
// which matters for the long filters used in simulation.
inline std::vector<double> ma_coefficients(const ParamVector& theta,
                                           std::size_t J) {
  require_valid(theta);
  auto beta = detail::binomial_series(-theta.delta, J);
  if (!theta.ma.empty())
    detail::multiply_poly_inplace(beta, detail::ma_poly(theta.ma));
  if (!theta.ar.empty())
    detail::divide_poly_inplace(beta, detail::ar_poly(theta.ar));
  return beta;
}

// zeta_j = d alpha_j / d theta as columns: [delta | phi_1..phi_p | psi_1..psi_q].
// Column formulas, all reduced to short-polynomial operations:
//   delta:  (d/ddelta (1-s)^delta) phi/psi
//   phi_i:  -s^i (1-s)^delta / psi
//   psi_i:  -s^i (1-s)^delta phi / psi^2
inline std::vector<std::vector<double>> zeta_coefficients(const ParamVector& theta,
                                                          std::size_t J) {
  require_valid(theta);
  const int p = int(theta.ar.size()), q = int(theta.ma.size());
  const auto phi = detail::ar_poly(theta.ar);
  const auto psi = detail::ma_poly(theta.ma);
  std::vector<std::vector<double>> cols;
  cols.reserve(std::size_t(p + q) + 1);

  {
    auto col = detail::binomial_series_ddelta(theta.delta, J);
    if (p > 0) detail::multiply_poly_inplace(col, phi);
    if (q > 0) detail::divide_poly_inplace(col, psi);
    cols.push_back(std::move(col));
  }

  // shared base (1-s)^delta / psi for the AR columns
  if (p > 0) {
    auto base = detail::binomial_series(theta.delta, J);
    if (q > 0) detail::divide_poly_inplace(base, psi);
    for (int i = 1; i <= p; ++i) {
      std::vector<double> col(J + 1, 0.0);
      for (std::size_t j = std::size_t(i); j <= J; ++j)
        col[j] = -base[j - std::size_t(i)];
      cols.push_back(std::move(col));
    }
  }

  // shared base (1-s)^delta phi / psi^2 for the MA columns
  if (q > 0) {
    auto base = detail::binomial_series(theta.delta, J);
    if (p > 0) detail::multiply_poly_inplace(base, phi);
    detail::divide_poly_inplace(base, psi);
    detail::divide_poly_inplace(base, psi);
    for (int i = 1; i <= q; ++i) {
      std::vector<double> col(J + 1, 0.0);
      for (std::size_t j = std::size_t(i); j <= J; ++j)
        col[j] = -base[j - std::size_t(i)];
      cols.push_back(std::move(col));
    }
  }
  return cols;
}

// Bundle of the three coefficient families at a common truncation.
struct CoefficientTable {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::vector<double>> zeta;  // columns, delta first
  std::size_t truncation = 0;

  static CoefficientTable build(const ParamVector& theta, std::size_t J) {
    CoefficientTable t;
    t.alpha = ar_coefficients(theta, J);
    t.beta = ma_coefficients(theta, J);
    t.zeta = zeta_coefficients(theta, J);
    t.truncation = J;
    return t;
  }
};

}  // namespace longmem
