// Monte Carlo experiments: sampling-distribution checks of the central limit
// behaviour of the CSS estimate, plus the diagnostic curves for the
// truncation error e_t - eps_t, the score replacement r_n - r_n*, the
// CSS/Whittle objective gap, and a nested-sample consistency proxy.
//
// Reproducibility contract: every replication draws from an independent
// stream seeded by substream(master_seed, n, replication); diagnostics run
// under substream namespaces derived from tag constants below. The whole
// report is a pure function of the config, and serial and parallel runs
// agree exactly because workers only fill their own preallocated slots and
// aggregation is a sequential reduce in (n, replication) order.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "longmem/css.hpp"
#include "longmem/parallel.hpp"
#include "longmem/rng.hpp"
#include "longmem/simulation.hpp"
#include "longmem/stats.hpp"
#include "longmem/whittle.hpp"

namespace longmem {

struct DiagnosticsFlags {
  bool truncation = false;
  bool score_replacement = false;
  bool objective_gap = false;
  bool consistency_path = false;
};

struct MonteCarloConfig {
  ModelSpec spec0;
  std::vector<std::size_t> n_grid;
  int replications = 100;
  InnovationLaw law;
  bool use_css = true;
  bool use_whittle = false;
  std::uint64_t master_seed = 1;
  DiagnosticsFlags diagnostics;
  int threads = 0;  // 0: auto (LONGMEM_THREADS / hardware)
};

struct EstimateRecord {
  std::string estimator;
  std::size_t n = 0;
  int replication = 0;
  ParamVector theta_hat;
  double sigma2_hat = 0.0;
  double se_delta = 0.0;
  bool converged = false;
  bool ci_covers_delta0 = false;
};

struct AggregateStats {
  std::string estimator;
  std::size_t n = 0;
  int used = 0;          // converged replications entering the aggregates
  int nonconverged = 0;  // counted, excluded
  std::vector<double> bias;
  Eigen::MatrixXd cov_scaled;     // covariance of sqrt(n)(theta_hat - theta0)
  Eigen::MatrixXd omega_inv_ref;  // Omega(theta0)^{-1}
  double coverage_delta = 0.0;    // plug-in 95% CI coverage of delta0
  double ks_stat = 0.0;           // truth-studentized delta component
  double ks_pvalue = 0.0;
  bool low_confidence = false;    // fewer than 30 usable replications
};

struct TruncationCurve {
  std::size_t n = 0;
  int replications = 0;
  std::vector<std::size_t> t;
  std::vector<double> mse;        // mean of (e_t - eps_t)^2 over replications
  double loglog_slope = 0.0;
  double max_t_mse_ratio = 0.0;   // max_t t*mse(t) / (t0*mse(t0)) at t0 = 16
};

struct ScoreReplacementCurve {
  std::vector<std::size_t> n;
  int replications = 0;
  std::vector<double> median_scaled_gap;  // median sqrt(n) ||r_n - r_n*||
  // medians of the components via the presample approximation of rho_t;
  // filled only when requested
  std::vector<double> median_r1, median_r2, median_r3;
};

struct ConsistencyTable {
  std::vector<std::size_t> n;
  int seeds = 0;
  std::vector<std::vector<double>> delta_abs_err;  // [seed][n index]
  std::vector<double> median_delta_err;            // per n
};

struct MonteCarloReport {
  MonteCarloConfig config;
  std::vector<EstimateRecord> records;
  std::vector<AggregateStats> aggregates;
  std::optional<TruncationCurve> truncation;
  std::optional<ScoreReplacementCurve> score_replacement;
  std::vector<std::pair<std::size_t, double>> objective_gap_medians;
  std::optional<ConsistencyTable> consistency;
};

namespace detail {

// substream namespaces for the diagnostic experiments
inline constexpr std::uint64_t kTagTruncation = 0x74727563;
inline constexpr std::uint64_t kTagScore = 0x73636f72;
inline constexpr std::uint64_t kTagGap = 0x6761702e;
inline constexpr std::uint64_t kTagConsistency = 0x636f6e73;

}  // namespace detail

// Fixed 27-point FARIMA(1, delta, 1) grid used by the objective-gap
// diagnostic: delta x phi x psi over three values each, all admissible.
inline std::vector<ParamVector> objective_gap_grid() {
  std::vector<ParamVector> grid;
  for (double d : {0.1, 0.25, 0.4})
    for (double phi : {-0.5, 0.0, 0.5})
      for (double psi : {-0.4, 0.0, 0.4}) {
        ParamVector theta;
        theta.delta = d;
        theta.ar = {phi};
        theta.ma = {psi};
        grid.push_back(std::move(theta));
      }
  return grid;
}

// t |-> mean squared (e_t(theta0) - eps_t) on the dyadic grid 16, 32, ..., n.
inline TruncationCurve truncation_diagnostic(const ModelSpec& spec0,
                                             std::size_t n, int replications,
                                             std::uint64_t seed,
                                             int threads = 0) {
  require_valid(spec0);
  if (replications < 1)
    throw std::invalid_argument("truncation_diagnostic: replications >= 1");
  TruncationCurve curve;
  curve.n = n;
  curve.replications = replications;
  for (std::size_t t = 16; t <= n; t *= 2) curve.t.push_back(t);
  if (curve.t.empty())
    throw std::invalid_argument("truncation_diagnostic: n must be >= 16");

  const std::size_t m = curve.t.size();
  std::vector<std::vector<double>> sq(static_cast<std::size_t>(replications));
  parallel_for(std::size_t(replications), threads, [&](std::size_t r) {
    const auto ts = simulate_truncated_ma(spec0, n, 10 * n,
                                          InnovationLaw{InnovationKind::gaussian, 0.0},
                                          substream(seed, n, r));
    const auto e = css_residuals(spec0.theta, ts.values);
    auto& own = sq[r];
    own.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double d = e[curve.t[k] - 1] - ts.innovations[curve.t[k] - 1];
      own[k] = d * d;
    }
  });

  curve.mse.assign(m, 0.0);
  for (const auto& own : sq)
    for (std::size_t k = 0; k < m; ++k) curve.mse[k] += own[k];
  for (auto& v : curve.mse) v /= double(replications);

  std::vector<double> lx(m), ly(m);
  for (std::size_t k = 0; k < m; ++k) {
    lx[k] = std::log(double(curve.t[k]));
    ly[k] = std::log(std::max(curve.mse[k], 1e-300));
  }
  curve.loglog_slope = ls_slope(lx, ly);
  const double ref = double(curve.t[0]) * curve.mse[0];
  double worst = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    worst = std::max(worst, double(curve.t[k]) * curve.mse[k]);
  curve.max_t_mse_ratio = worst / ref;
  return curve;
}

// n |-> median sqrt(n) ||r_n(theta0) - r_n*(theta0)||, optionally split into
// the three remainder components through the presample rho_t approximation.
inline ScoreReplacementCurve score_replacement_diagnostic(
    const ModelSpec& spec0, const std::vector<std::size_t>& n_grid,
    int replications, std::uint64_t seed, bool with_split = false,
    int threads = 0) {
  require_valid(spec0);
  ScoreReplacementCurve curve;
  curve.n = n_grid;
  curve.replications = replications;
  for (std::size_t n : n_grid) {
    std::vector<double> gap(static_cast<std::size_t>(replications));
    std::vector<double> r1n(static_cast<std::size_t>(replications)),
            r2n(static_cast<std::size_t>(replications)), r3n(static_cast<std::size_t>(replications));
    const std::size_t m_pre = 10 * n;
    parallel_for(std::size_t(replications), threads, [&](std::size_t r) {
      const auto ts = simulate_truncated_ma(
          spec0, n, m_pre, InnovationLaw{InnovationKind::gaussian, 0.0},
          substream(seed, n, r));
      const auto e = css_residuals(spec0.theta, ts.values);
      const std::size_t dim = std::size_t(spec0.theta.dim());

      std::vector<double> rn(dim), rstar(dim);
      const auto zeta = zeta_coefficients(spec0.theta, n - 1);
      std::vector<std::vector<double>> hcols(dim);
      for (std::size_t c = 0; c < dim; ++c) {
        hcols[c] = detail::triangular_filter(zeta[c], ts.values);
        rn[c] = 2.0 / double(n) * detail::dot(hcols[c].data(), e.data(), n);
        rstar[c] =
            2.0 / double(n) * detail::dot(hcols[c].data(), ts.innovations.data(), n);
      }
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c)
        s += (rn[c] - rstar[c]) * (rn[c] - rstar[c]);
      gap[r] = std::sqrt(double(n)) * std::sqrt(s);

      if (with_split) {
        // rho_t truncated at j <= t-1+m_pre using the retained presample
        std::vector<double> ext(ts.presample);
        ext.insert(ext.end(), ts.values.begin(), ts.values.end());
        const auto zext = zeta_coefficients(spec0.theta, ext.size() - 1);
        double a1 = 0.0, a2 = 0.0, a3 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
          const auto hext = detail::triangular_filter(zext[c], ext);
          double s1 = 0.0, s2 = 0.0, s3 = 0.0;
          for (std::size_t t = 0; t < n; ++t) {
            const double rho = hext[m_pre + t];
            const double hmr = hcols[c][t] - rho;
            const double de = e[t] - ts.innovations[t];
            s1 += hmr * ts.innovations[t];
            s2 += rho * de;
            s3 += hmr * de;
          }
          a1 += s1 * s1;
          a2 += s2 * s2;
          a3 += s3 * s3;
        }
        r1n[r] = 2.0 / double(n) * std::sqrt(a1);
        r2n[r] = 2.0 / double(n) * std::sqrt(a2);
        r3n[r] = 2.0 / double(n) * std::sqrt(a3);
      }
    });
    curve.median_scaled_gap.push_back(median(gap));
    if (with_split) {
      curve.median_r1.push_back(median(r1n));
      curve.median_r2.push_back(median(r2n));
      curve.median_r3.push_back(median(r3n));
    }
  }
  return curve;
}

// Nested-sample consistency proxy: one long path per seed, CSS estimates on
// prefixes, per-seed |delta_hat - delta0|.
inline ConsistencyTable consistency_path(const ModelSpec& spec0,
                                         const std::vector<std::size_t>& n_grid,
                                         int seeds, std::uint64_t seed,
                                         int threads = 0) {
  require_valid(spec0);
  if (n_grid.empty() || seeds < 1)
    throw std::invalid_argument("consistency_path: bad arguments");
  const std::size_t n_max = n_grid.back();
  const auto gamma = autocovariance(spec0, n_max - 1);

  ConsistencyTable table;
  table.n = n_grid;
  table.seeds = seeds;
  table.delta_abs_err.assign(std::size_t(seeds),
                             std::vector<double>(n_grid.size(), 0.0));
  parallel_for(std::size_t(seeds), threads, [&](std::size_t s) {
    const auto ts = simulate_exact_gaussian_from_gamma(
        spec0, gamma, n_max, substream(seed, 0, s));
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      std::span<const double> prefix(ts.values.data(), n_grid[k]);
      const auto res = css_estimate(spec0.order, prefix);
      table.delta_abs_err[s][k] =
          std::abs(res.theta_hat.delta - spec0.theta.delta);
    }
  });
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    std::vector<double> col(static_cast<std::size_t>(seeds));
    for (std::size_t s = 0; s < std::size_t(seeds); ++s)
      col[s] = table.delta_abs_err[s][k];
    table.median_delta_err.push_back(median(col));
  }
  return table;
}

inline void validate_config(const MonteCarloConfig& config) {
  require_valid(config.spec0);
  if (config.replications < 1)
    throw std::invalid_argument("montecarlo: replications must be >= 1");
  if (config.n_grid.empty())
    throw std::invalid_argument("montecarlo: n_grid must not be empty");
  for (std::size_t i = 1; i < config.n_grid.size(); ++i)
    if (config.n_grid[i] <= config.n_grid[i - 1])
      throw std::invalid_argument("montecarlo: n_grid must be strictly increasing");
  if (!config.use_css && !config.use_whittle)
    throw std::invalid_argument("montecarlo: no estimator selected");
  if (config.law.kind == InnovationKind::student_t && !(config.law.df > 4.0))
    throw std::invalid_argument("montecarlo: student-t needs df > 4");
}

inline MonteCarloReport run_experiment(const MonteCarloConfig& config) {
  validate_config(config);
  MonteCarloReport report;
  report.config = config;

  const ParamVector& theta0 = config.spec0.theta;
  const std::vector<double> theta0_flat = theta0.flatten();
  const std::size_t dim = std::size_t(theta0.dim());
  const double delta0 = theta0.delta;

  const auto info0 = information_matrix(theta0);
  const Eigen::MatrixXd omega_inv_ref =
      info0.omega.ldlt().solve(Eigen::MatrixXd::Identity(
          info0.omega.rows(), info0.omega.cols()));
  const double sigma_ref = std::sqrt(omega_inv_ref(0, 0));

  std::vector<std::string> estimators;
  if (config.use_css) estimators.push_back("css");
  if (config.use_whittle) estimators.push_back("whittle");

  const std::size_t R = std::size_t(config.replications);
  for (std::size_t n : config.n_grid) {
    std::vector<double> gamma;
    if (config.law.kind == InnovationKind::gaussian)
      gamma = autocovariance(config.spec0, n - 1);

    // slot per (replication, estimator), filled in parallel
    std::vector<std::vector<EstimateRecord>> slots(R);
    parallel_for(R, config.threads, [&](std::size_t r) {
      const std::uint64_t s = substream(config.master_seed, n, r);
      TimeSeries ts;
      if (config.law.kind == InnovationKind::gaussian)
        ts = simulate_exact_gaussian_from_gamma(config.spec0, gamma, n, s);
      else
        ts = simulate_truncated_ma(config.spec0, n, config.law, s);

      for (const auto& name : estimators) {
        EstimationResult res;
        bool failed = false;
        try {
          res = name == "css" ? css_estimate(config.spec0.order, ts.values)
                              : whittle_estimate(config.spec0.order, ts.values);
        } catch (const std::exception&) {
          failed = true;  // logged as non-converged, never aborts the run
        }
        EstimateRecord rec;
        rec.estimator = name;
        rec.n = n;
        rec.replication = int(r);
        if (!failed) {
          rec.theta_hat = res.theta_hat;
          rec.sigma2_hat = res.sigma2_hat;
          rec.se_delta = res.std_errors.empty() ? 0.0 : res.std_errors[0];
          rec.converged = res.converged;
          rec.ci_covers_delta0 = !res.ci95.empty() &&
                                 res.ci95[0].first <= delta0 &&
                                 delta0 <= res.ci95[0].second;
        } else {
          rec.theta_hat = theta0;  // placeholder, excluded from aggregates
          rec.converged = false;
        }
        slots[r].push_back(std::move(rec));
      }
    });

    for (const auto& name : estimators) {
      AggregateStats agg;
      agg.estimator = name;
      agg.n = n;
      std::vector<std::vector<double>> devs;  // theta_hat - theta0, converged only
      std::vector<double> zs;                 // truth-studentized delta
      int covered = 0;
      for (std::size_t r = 0; r < R; ++r) {
        for (const auto& rec : slots[r]) {
          if (rec.estimator != name) continue;
          report.records.push_back(rec);
          if (!rec.converged) {
            ++agg.nonconverged;
            continue;
          }
          const auto flat = rec.theta_hat.flatten();
          std::vector<double> dev(dim);
          for (std::size_t i = 0; i < dim; ++i)
            dev[i] = flat[i] - theta0_flat[i];
          devs.push_back(std::move(dev));
          zs.push_back(std::sqrt(double(n)) * (rec.theta_hat.delta - delta0) /
                       sigma_ref);
          if (rec.ci_covers_delta0) ++covered;
        }
      }
      agg.used = int(devs.size());
      agg.low_confidence = agg.used < 30;
      agg.omega_inv_ref = omega_inv_ref;
      agg.bias.assign(dim, 0.0);
      agg.cov_scaled = Eigen::MatrixXd::Zero(Eigen::Index(dim), Eigen::Index(dim));
      if (!devs.empty()) {
        for (const auto& dev : devs)
          for (std::size_t i = 0; i < dim; ++i) agg.bias[i] += dev[i];
        for (auto& b : agg.bias) b /= double(devs.size());
        if (devs.size() > 1) {
          for (const auto& dev : devs)
            for (std::size_t i = 0; i < dim; ++i)
              for (std::size_t j = 0; j < dim; ++j)
                agg.cov_scaled(Eigen::Index(i), Eigen::Index(j)) +=
                    (dev[i] - agg.bias[i]) * (dev[j] - agg.bias[j]);
          agg.cov_scaled *= double(n) / double(devs.size() - 1);
        }
        agg.coverage_delta = double(covered) / double(devs.size());
        agg.ks_stat = ks_statistic_normal(zs);
        agg.ks_pvalue = kolmogorov_q(std::sqrt(double(zs.size())) * agg.ks_stat);
      }
      report.aggregates.push_back(std::move(agg));
    }
  }

  if (config.diagnostics.truncation)
    report.truncation = truncation_diagnostic(
        config.spec0, config.n_grid.back(), config.replications,
        mix64(config.master_seed ^ detail::kTagTruncation), config.threads);
  if (config.diagnostics.score_replacement)
    report.score_replacement = score_replacement_diagnostic(
        config.spec0, config.n_grid, config.replications,
        mix64(config.master_seed ^ detail::kTagScore), false, config.threads);
  if (config.diagnostics.objective_gap) {
    const int seeds = std::min(config.replications, 20);
    const auto grid = objective_gap_grid();
    for (std::size_t n : config.n_grid) {
      std::vector<double> gaps(static_cast<std::size_t>(seeds));
      const auto gamma = autocovariance(config.spec0, n - 1);
      parallel_for(std::size_t(seeds), config.threads, [&](std::size_t s) {
        const auto ts = simulate_exact_gaussian_from_gamma(
            config.spec0, gamma, n,
            substream(mix64(config.master_seed ^ detail::kTagGap), n, s));
        gaps[s] = objective_gap(ts.values, grid);
      });
      report.objective_gap_medians.emplace_back(n, median(gaps));
    }
  }
  if (config.diagnostics.consistency_path)
    report.consistency = consistency_path(
        config.spec0, config.n_grid, std::min(config.replications, 50),
        mix64(config.master_seed ^ detail::kTagConsistency), config.threads);
  return report;
}

}  // namespace longmem
