// JSON serialization of estimation results and Monte Carlo reports.
// The schema is documented in the README; all doubles print with %.17g.

#pragma once

#include <ostream>

#include "longmem/css.hpp"
#include "longmem/io.hpp"
#include "longmem/montecarlo.hpp"

namespace longmem {

namespace detail {

inline void write_param_vector(JsonWriter& w, const ParamVector& theta) {
  w.begin_object();
  w.kv("delta", theta.delta);
  w.kv("ar", theta.ar);
  w.kv("ma", theta.ma);
  w.end_object();
}

inline void write_matrix(JsonWriter& w, const Eigen::MatrixXd& m) {
  w.begin_array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    w.begin_array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.value(m(r, c));
    w.end_array();
  }
  w.end_array();
}

}  // namespace detail

inline void write_estimation_json(std::ostream& os,
                                  const EstimationResult& res) {
  JsonWriter w(os);
  w.begin_object();
  w.kv("estimator", res.estimator);
  w.kv("n", res.n);
  w.key("theta_hat");
  detail::write_param_vector(w, res.theta_hat);
  w.kv("sigma2_hat", res.sigma2_hat);
  w.kv("objective", res.objective);
  w.kv("gradient_norm", res.gradient_norm);
  w.kv("converged", res.converged);
  w.kv("iterations", res.iterations);
  w.kv("starts", res.starts);
  w.kv("std_errors", res.std_errors);
  w.key("ci95").begin_array();
  for (const auto& [lo, hi] : res.ci95) {
    w.begin_array();
    w.value(lo);
    w.value(hi);
    w.end_array();
  }
  w.end_array();
  w.key("omega_hat");
  detail::write_matrix(w, res.omega_hat);
  w.end_object();
}

inline void write_report_json(std::ostream& os, const MonteCarloReport& rep,
                              bool include_records = true) {
  JsonWriter w(os);
  w.begin_object();

  w.key("config").begin_object();
  w.key("model").begin_object();
  w.kv("order.p", rep.config.spec0.order.p);
  w.kv("order.q", rep.config.spec0.order.q);
  w.kv("theta.delta", rep.config.spec0.theta.delta);
  w.kv("theta.ar", rep.config.spec0.theta.ar);
  w.kv("theta.ma", rep.config.spec0.theta.ma);
  w.kv("sigma2", rep.config.spec0.sigma2);
  w.end_object();
  w.key("n_grid").begin_array();
  for (std::size_t n : rep.config.n_grid) w.value(n);
  w.end_array();
  w.kv("replications", rep.config.replications);
  const char* law = rep.config.law.kind == InnovationKind::gaussian ? "gaussian"
                    : rep.config.law.kind == InnovationKind::uniform
                        ? "uniform"
                        : "student-t";
  w.kv("law", law);
  if (rep.config.law.kind == InnovationKind::student_t)
    w.kv("law.df", rep.config.law.df);
  w.kv("master_seed", std::uint64_t(rep.config.master_seed));
  w.key("estimators").begin_array();
  if (rep.config.use_css) w.value("css");
  if (rep.config.use_whittle) w.value("whittle");
  w.end_array();
  w.end_object();

  w.key("aggregates").begin_array();
  for (const auto& a : rep.aggregates) {
    w.begin_object();
    w.kv("estimator", a.estimator);
    w.kv("n", a.n);
    w.kv("used", a.used);
    w.kv("nonconverged", a.nonconverged);
    w.kv("low_confidence", a.low_confidence);
    w.kv("bias", a.bias);
    w.key("cov_scaled");
    detail::write_matrix(w, a.cov_scaled);
    w.key("omega_inv_ref");
    detail::write_matrix(w, a.omega_inv_ref);
    w.kv("coverage95_delta", a.coverage_delta);
    w.kv("ks_stat", a.ks_stat);
    w.kv("ks_pvalue", a.ks_pvalue);
    w.end_object();
  }
  w.end_array();

  w.key("diagnostics").begin_object();
  if (rep.truncation) {
    const auto& tc = *rep.truncation;
    w.key("truncation").begin_object();
    w.kv("n", tc.n);
    w.kv("replications", tc.replications);
    w.key("t").begin_array();
    for (std::size_t t : tc.t) w.value(t);
    w.end_array();
    w.kv("mse", tc.mse);
    w.kv("loglog_slope", tc.loglog_slope);
    w.kv("max_t_mse_ratio", tc.max_t_mse_ratio);
    w.end_object();
  }
  if (rep.score_replacement) {
    const auto& sc = *rep.score_replacement;
    w.key("score_replacement").begin_object();
    w.key("n").begin_array();
    for (std::size_t n : sc.n) w.value(n);
    w.end_array();
    w.kv("replications", sc.replications);
    w.kv("median_scaled_gap", sc.median_scaled_gap);
    if (!sc.median_r1.empty()) {
      w.kv("median_r1", sc.median_r1);
      w.kv("median_r2", sc.median_r2);
      w.kv("median_r3", sc.median_r3);
    }
    w.end_object();
  }
  if (!rep.objective_gap_medians.empty()) {
    w.key("objective_gap").begin_array();
    for (const auto& [n, gap] : rep.objective_gap_medians) {
      w.begin_object();
      w.kv("n", n);
      w.kv("median_gap", gap);
      w.end_object();
    }
    w.end_array();
  }
  if (rep.consistency) {
    const auto& ct = *rep.consistency;
    w.key("consistency_path").begin_object();
    w.key("n").begin_array();
    for (std::size_t n : ct.n) w.value(n);
    w.end_array();
    w.kv("seeds", ct.seeds);
    w.kv("median_delta_abs_err", ct.median_delta_err);
    w.end_object();
  }
  w.end_object();

  if (include_records) {
    w.key("records").begin_array();
    for (const auto& rec : rep.records) {
      w.begin_object();
      w.kv("estimator", rec.estimator);
      w.kv("n", rec.n);
      w.kv("replication", rec.replication);
      w.key("theta_hat");
      detail::write_param_vector(w, rec.theta_hat);
      w.kv("sigma2_hat", rec.sigma2_hat);
      w.kv("se_delta", rec.se_delta);
      w.kv("converged", rec.converged);
      w.kv("ci_covers_delta0", rec.ci_covers_delta0);
      w.end_object();
    }
    w.end_array();
  }
  w.end_object();
}

// Optional flat dump of the per-replication estimates.
inline void write_records_csv(std::ostream& os,
                              const MonteCarloReport& rep) {
  os << "estimator,n,replication,delta_hat";
  const int p = rep.config.spec0.order.p, q = rep.config.spec0.order.q;
  for (int i = 1; i <= p; ++i) os << ",ar" << i;
  for (int i = 1; i <= q; ++i) os << ",ma" << i;
  os << ",sigma2_hat,se_delta,converged\n";
  for (const auto& rec : rep.records) {
    os << rec.estimator << ',' << rec.n << ',' << rec.replication << ','
       << format_double(rec.theta_hat.delta);
    for (double v : rec.theta_hat.ar) os << ',' << format_double(v);
    for (double v : rec.theta_hat.ma) os << ',' << format_double(v);
    os << ',' << format_double(rec.sigma2_hat) << ','
       << format_double(rec.se_delta) << ',' << (rec.converged ? 1 : 0)
       << '\n';
  }
}

}  // namespace longmem
