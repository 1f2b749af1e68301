// FARIMA sample-path generation.
//
// Two samplers with complementary roles:
//   simulate_exact_gaussian  Durbin-Levinson recursion on the model
//                            autocovariances; the sampled path has exactly
//                            the target Gaussian law. Innovation record holds
//                            standardized one-step prediction errors and is
//                            flagged approximate.
//   simulate_truncated_ma    x_t = sum_{j=0}^{J_beta} beta_j eps_{t-j} with
//                            J_beta = 100 n and presample m_pre = 10 n kept.
//                            Mandatory when the true eps_t are needed (score
//                            and truncation diagnostics) or the law is not
//                            Gaussian. beta_j ~ j^{delta-1}, so the omitted
//                            tail is a small perturbation for delta away
//                            from 1/2; the exact sampler covers the rest.
//
// Both are deterministic functions of (spec, n, seed).

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "longmem/fft.hpp"
#include "longmem/model.hpp"
#include "longmem/rng.hpp"
#include "longmem/series.hpp"
#include "longmem/spectrum.hpp"
#include "longmem/timeseries.hpp"

namespace longmem {

// i.i.d. draws standardized to mean zero and variance sigma2.
inline std::vector<double> draw_innovations(const InnovationLaw& law,
                                            std::size_t count, double sigma2,
                                            std::uint64_t seed) {
  if (sigma2 <= 0.0)
    throw std::domain_error("draw_innovations: sigma2 must be positive");
  Rng rng(seed);
  std::vector<double> eps(count);
  switch (law.kind) {
    case InnovationKind::gaussian: {
      const double s = std::sqrt(sigma2);
      for (auto& e : eps) e = s * rng.normal();
      break;
    }
    case InnovationKind::uniform: {
      // width sqrt(12 sigma2) gives variance sigma2
      const double half = std::sqrt(3.0 * sigma2);
      for (auto& e : eps) e = half * rng.uniform_pm1();
      break;
    }
    case InnovationKind::student_t: {
      if (!(law.df > 4.0))
        throw std::domain_error(
            "draw_innovations: student-t df must exceed 4 (finite 4th moment)");
      const double s = std::sqrt(sigma2 * (law.df - 2.0) / law.df);
      for (auto& e : eps) e = s * rng.student_t(law.df);
      break;
    }
  }
  return eps;
}

// Durbin-Levinson sampling from precomputed autocovariances gamma(0..n-1).
// Exposed so Monte Carlo loops can share one gamma table across replications.
inline TimeSeries simulate_exact_gaussian_from_gamma(
    const ModelSpec& spec, std::span<const double> gamma, std::size_t n,
    std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("simulate: n must be positive");
  if (gamma.size() < n)
    throw std::invalid_argument("simulate: gamma table shorter than n");
  Rng rng(seed);
  const double sigma0 = std::sqrt(spec.sigma2);

  TimeSeries ts;
  ts.values.resize(n);
  ts.innovations.resize(n);
  ts.innovations_kind = InnovationsKind::approximate;
  ts.truth = spec;

  std::vector<double> phi, phi_new;  // one-step predictor coefficients
  double v = gamma[0];               // prediction variance
  if (!(v > 0.0))
    throw std::runtime_error("simulate: gamma(0) not positive");
  {
    const double z = rng.normal();
    ts.values[0] = std::sqrt(v) * z;
    ts.innovations[0] = sigma0 * z;
  }
  for (std::size_t t = 1; t < n; ++t) {
    // extend the predictor from order t-1 to order t
    double acc = gamma[t];
    for (std::size_t j = 0; j < phi.size(); ++j) acc -= phi[j] * gamma[t - 1 - j];
    const double k = acc / v;
    phi_new.resize(t);
    for (std::size_t j = 0; j + 1 < t; ++j)
      phi_new[j] = phi[j] - k * phi[t - 2 - j];
    phi_new[t - 1] = k;
    phi.swap(phi_new);
    v *= (1.0 - k * k);
    if (!(v > 0.0))
      throw std::runtime_error(
          "simulate: Durbin-Levinson breakdown (non-positive prediction variance)");
    double m = 0.0;
    for (std::size_t j = 0; j < t; ++j) m += phi[j] * ts.values[t - 1 - j];
    const double z = rng.normal();
    ts.values[t] = m + std::sqrt(v) * z;
    ts.innovations[t] = sigma0 * z;  // standardized one-step error
  }
  return ts;
}

inline TimeSeries simulate_exact_gaussian(const ModelSpec& spec, std::size_t n,
                                          std::uint64_t seed) {
  require_valid(spec);
  if (n == 0) throw std::invalid_argument("simulate: n must be positive");
  const auto gamma = autocovariance(spec, n - 1);
  return simulate_exact_gaussian_from_gamma(spec, gamma, n, seed);
}

inline TimeSeries simulate_truncated_ma(const ModelSpec& spec, std::size_t n,
                                        std::size_t m_pre,
                                        const InnovationLaw& law,
                                        std::uint64_t seed) {
  require_valid(spec);
  if (n == 0) throw std::invalid_argument("simulate: n must be positive");
  if (m_pre < 10 * n)
    throw std::invalid_argument("simulate_truncated_ma: m_pre must be >= 10 n");
  const std::size_t j_beta = 100 * n;
  const std::size_t m_burn = m_pre + j_beta;
  const std::size_t total = n + m_burn;  // eps over t = 1-m_burn .. n

  const auto beta = ma_coefficients(spec.theta, j_beta);
  const auto eps = draw_innovations(law, total, spec.sigma2, seed);

  // x_s = sum_j beta_j eps_{s-j}; conv index c = s - 1 + m_burn is fully
  // supported for s >= 1 - m_pre
  const auto conv = fft::convolve(beta, eps, total);

  TimeSeries ts;
  ts.truth = spec;
  ts.presample.resize(m_pre);
  for (std::size_t i = 0; i < m_pre; ++i) ts.presample[i] = conv[j_beta + i];
  ts.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) ts.values[i] = conv[m_burn + i];
  ts.innovations.assign(eps.end() - std::ptrdiff_t(n), eps.end());
  ts.innovations_kind = InnovationsKind::exact;
  return ts;
}

inline TimeSeries simulate_truncated_ma(const ModelSpec& spec, std::size_t n,
                                        const InnovationLaw& law,
                                        std::uint64_t seed) {
  return simulate_truncated_ma(spec, n, 10 * n, law, seed);
}

}  // namespace longmem
