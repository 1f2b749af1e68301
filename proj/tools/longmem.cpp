// longmem command-line front end.
//
//   simulate    draw a FARIMA sample path, write it as CSV
//   estimate    fit a FARIMA model to a CSV series (CSS or Whittle)
//   montecarlo  run a replication study from a config file
//   info        print Omega, its inverse, and standard-error tables
//   spectrum    sample the spectral density on a frequency grid
//
// Exit codes: 0 success, 2 invalid input or model, 3 non-convergence.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "longmem/longmem.hpp"
#include "longmem/report_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;

struct ModelFlags {
  double delta = 0.25;
  std::vector<double> ar, ma;
  double sigma2 = 1.0;
  std::string config_path;
};

void add_model_flags(CLI::App* cmd, ModelFlags* mf) {
  cmd->add_option("--delta", mf->delta, "memory parameter, in (0, 0.5)");
  cmd->add_option("--ar", mf->ar, "AR coefficients phi_1..phi_p");
  cmd->add_option("--ma", mf->ma, "MA coefficients psi_1..psi_q");
  cmd->add_option("--sigma2", mf->sigma2, "innovation variance (default 1)");
  cmd->add_option("--config", mf->config_path,
                  "key-value model config (order.p, order.q, theta.delta, "
                  "theta.ar, theta.ma, sigma2); flags override");
}

longmem::ModelSpec resolve_model(const ModelFlags& mf, const CLI::App* cmd) {
  longmem::ModelSpec spec;
  spec.theta.delta = mf.delta;
  if (!mf.config_path.empty())
    spec = longmem::model_from_kv(longmem::parse_kv_file(mf.config_path));
  if (cmd->count("--delta")) spec.theta.delta = mf.delta;
  if (cmd->count("--ar")) spec.theta.ar = mf.ar;
  if (cmd->count("--ma")) spec.theta.ma = mf.ma;
  if (cmd->count("--sigma2")) spec.sigma2 = mf.sigma2;
  spec.order.p = int(spec.theta.ar.size());
  spec.order.q = int(spec.theta.ma.size());
  const auto rep = longmem::validate(spec);
  if (!rep.ok()) throw std::invalid_argument("invalid model: " + rep.message());
  return spec;
}

std::string innovations_path(const std::string& out) {
  const std::string suffix = ".csv";
  if (out.size() > suffix.size() &&
      out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out.substr(0, out.size() - suffix.size()) + ".innovations.csv";
  return out + ".innovations.csv";
}

// parse a montecarlo experiment config file
longmem::MonteCarloConfig parse_mc_config(const std::string& path) {
  auto kv = longmem::parse_kv_file(path);
  longmem::MonteCarloConfig cfg;

  std::map<std::string, std::string> model_kv;
  for (const char* key :
       {"order.p", "order.q", "theta.delta", "theta.ar", "theta.ma", "sigma2"}) {
    auto it = kv.find(key);
    if (it != kv.end()) {
      model_kv[key] = it->second;
      kv.erase(it);
    }
  }
  cfg.spec0 = longmem::model_from_kv(model_kv);

  auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) return "";
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (const auto v = take("n_grid"); !v.empty()) {
    for (double d : longmem::parse_double_list(v))
      cfg.n_grid.push_back(std::size_t(d));
  } else {
    throw std::invalid_argument("montecarlo config: missing n_grid");
  }
  if (const auto v = take("replications"); !v.empty())
    cfg.replications = std::stoi(v);
  if (const auto v = take("master_seed"); !v.empty())
    cfg.master_seed = std::stoull(v);
  if (const auto v = take("threads"); !v.empty()) cfg.threads = std::stoi(v);
  if (const auto v = take("law"); !v.empty()) {
    if (v == "gaussian")
      cfg.law.kind = longmem::InnovationKind::gaussian;
    else if (v == "uniform")
      cfg.law.kind = longmem::InnovationKind::uniform;
    else if (v == "student-t")
      cfg.law.kind = longmem::InnovationKind::student_t;
    else
      throw std::invalid_argument("montecarlo config: unknown law '" + v + "'");
  }
  if (const auto v = take("law.df"); !v.empty()) cfg.law.df = std::stod(v);
  if (const auto v = take("estimators"); !v.empty()) {
    cfg.use_css = v.find("css") != std::string::npos;
    cfg.use_whittle = v.find("whittle") != std::string::npos;
    if (!cfg.use_css && !cfg.use_whittle)
      throw std::invalid_argument("montecarlo config: estimators must name css and/or whittle");
  }
  if (const auto v = take("diagnostics"); !v.empty()) {
    cfg.diagnostics.truncation = v.find("truncation") != std::string::npos;
    cfg.diagnostics.score_replacement =
        v.find("score_replacement") != std::string::npos;
    cfg.diagnostics.objective_gap = v.find("objective_gap") != std::string::npos;
    cfg.diagnostics.consistency_path =
        v.find("consistency_path") != std::string::npos;
  }
  take("out");            // handled by the caller
  take("estimates_csv");  // handled by the caller
  if (!kv.empty())
    throw std::invalid_argument("montecarlo config: unknown key '" +
                                kv.begin()->first + "'");
  return cfg;
}

void print_summary_table(std::ostream& os, const longmem::MonteCarloReport& rep) {
  os << "estimator        n   used  nonconv      bias(delta)  var sqrt(n)(d-d0)"
        "  cover95     ks-p\n";
  for (const auto& a : rep.aggregates) {
    char line[256];
    std::snprintf(line, sizeof line,
                  "%-9s %8zu %6d %8d %16.6f %18.6f %8.3f %8.4f%s\n",
                  a.estimator.c_str(), a.n, a.used, a.nonconverged,
                  a.bias.empty() ? 0.0 : a.bias[0],
                  a.cov_scaled.size() ? a.cov_scaled(0, 0) : 0.0,
                  a.coverage_delta, a.ks_pvalue,
                  a.low_confidence ? "  [low-confidence]" : "");
    os << line;
  }
  if (rep.truncation)
    os << "truncation: loglog slope " << rep.truncation->loglog_slope
       << ", max t*mse ratio " << rep.truncation->max_t_mse_ratio << "\n";
  if (rep.score_replacement) {
    os << "score replacement medians:";
    for (std::size_t i = 0; i < rep.score_replacement->n.size(); ++i)
      os << "  n=" << rep.score_replacement->n[i] << " "
         << rep.score_replacement->median_scaled_gap[i];
    os << "\n";
  }
  for (const auto& [n, gap] : rep.objective_gap_medians)
    os << "objective gap median at n=" << n << ": " << gap << "\n";
  if (rep.consistency) {
    os << "consistency medians |delta_hat - delta0|:";
    for (std::size_t i = 0; i < rep.consistency->n.size(); ++i)
      os << "  n=" << rep.consistency->n[i] << " "
         << rep.consistency->median_delta_err[i];
    os << "\n";
  }
}

int cmd_simulate(const longmem::ModelSpec& spec, std::size_t n,
                 std::uint64_t seed, const std::string& method,
                 const std::string& out, bool emit_innovations) {
  longmem::TimeSeries ts;
  if (method == "exact") {
    ts = longmem::simulate_exact_gaussian(spec, n, seed);
  } else if (method == "truncated-ma") {
    ts = longmem::simulate_truncated_ma(
        spec, n, longmem::InnovationLaw{longmem::InnovationKind::gaussian, 0.0},
        seed);
  } else {
    throw std::invalid_argument("simulate: unknown method '" + method + "'");
  }
  longmem::write_csv_column(out, "x", ts.values);
  if (emit_innovations)
    longmem::write_csv_column(innovations_path(out), "eps", ts.innovations);
  return kExitOk;
}

int cmd_estimate(const std::string& in, int p, int q,
                 const std::string& estimator, bool mean_correct,
                 const std::string& out) {
  const auto x = longmem::read_csv_column(in, "x");
  if (x.size() < 20)
    throw std::invalid_argument("estimate: need at least 20 observations");
  longmem::MinimizeOptions opts;
  opts.mean_correct = mean_correct;
  const longmem::ModelOrder order{p, q};
  const auto res = estimator == "whittle"
                       ? longmem::whittle_estimate(order, x, opts)
                       : longmem::css_estimate(order, x, opts);
  if (out.empty() || out == "-") {
    longmem::write_estimation_json(std::cout, res);
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + out);
    longmem::write_estimation_json(os, res);
  }
  return res.converged ? kExitOk : kExitNoConvergence;
}

int cmd_info(const longmem::ModelSpec& spec, const std::vector<std::size_t>& ns) {
  const auto info = longmem::information_matrix(spec.theta);
  const Eigen::MatrixXd inv = info.omega.ldlt().solve(
      Eigen::MatrixXd::Identity(info.omega.rows(), info.omega.cols()));
  longmem::JsonWriter w(std::cout);
  w.begin_object();
  w.key("omega");
  longmem::detail::write_matrix(w, info.omega);
  w.key("omega_inv");
  longmem::detail::write_matrix(w, inv);
  w.kv("quad_nodes", info.quad_nodes);
  w.kv("quad_error_estimate", info.quad_error_estimate);
  w.key("standard_errors").begin_array();
  for (std::size_t n : ns) {
    w.begin_object();
    w.kv("n", n);
    w.kv("se", longmem::standard_errors(info, n));
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return kExitOk;
}

int cmd_spectrum(const longmem::ModelSpec& spec, int gridpoints,
                 const std::string& out) {
  std::ostringstream body;
  body << "lambda,f\n";
  for (int i = 1; i <= gridpoints; ++i) {
    const double lambda = std::numbers::pi * double(i) / double(gridpoints);
    body << longmem::format_double(lambda) << ','
         << longmem::format_double(longmem::spectral_density(spec, lambda))
         << '\n';
  }
  if (out.empty() || out == "-") {
    std::cout << body.str();
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + out);
    os << body.str();
  }
  return kExitOk;
}

int cmd_montecarlo(const std::string& config_path, int replications_override,
                   std::string out_override) {
  auto cfg = parse_mc_config(config_path);
  if (replications_override > 0) cfg.replications = replications_override;

  // out / estimates_csv live in the config but may be overridden
  auto kv = longmem::parse_kv_file(config_path);
  std::string out = out_override;
  if (out.empty()) {
    auto it = kv.find("out");
    out = it == kv.end() ? "report.json" : it->second;
  }
  std::string est_csv;
  if (auto it = kv.find("estimates_csv"); it != kv.end()) est_csv = it->second;

  const auto rep = longmem::run_experiment(cfg);
  print_summary_table(std::cout, rep);
  {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + out);
    longmem::write_report_json(os, rep);
  }
  std::cout << "report written to " << out << "\n";
  if (!est_csv.empty()) {
    std::ofstream os(est_csv, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + est_csv);
    longmem::write_records_csv(os, rep);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FARIMA long-memory time-series estimation by conditional sum"
               " of squares, with Whittle cross-checks and Monte Carlo tools"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a sample path to CSV");
  ModelFlags sim_mf;
  add_model_flags(sim, &sim_mf);
  std::size_t sim_n = 0;
  std::uint64_t sim_seed = 1;
  std::string sim_method = "exact";
  std::string sim_out = "series.csv";
  bool sim_emit = false;
  sim->add_option("--n", sim_n, "sample size")->required();
  sim->add_option("--seed", sim_seed, "64-bit seed");
  sim->add_option("--method", sim_method, "exact | truncated-ma")
      ->check(CLI::IsMember({"exact", "truncated-ma"}));
  sim->add_option("--out", sim_out, "output CSV path");
  sim->add_flag("--emit-innovations", sim_emit,
                "also write <out stem>.innovations.csv");

  // estimate
  auto* est = app.add_subcommand("estimate", "fit a model to a CSV series");
  std::string est_in, est_out = "-", est_estimator = "css",
              est_mean = "on";
  int est_p = 0, est_q = 0;
  est->add_option("--in", est_in, "input CSV (single column, header 'x')")
      ->required();
  est->add_option("--p", est_p, "AR order");
  est->add_option("--q", est_q, "MA order");
  est->add_option("--estimator", est_estimator, "css | whittle")
      ->check(CLI::IsMember({"css", "whittle"}));
  est->add_option("--mean-correct", est_mean, "on | off (default on)")
      ->check(CLI::IsMember({"on", "off"}));
  est->add_option("--out", est_out, "output JSON path ('-' = stdout)");

  // montecarlo
  auto* mc = app.add_subcommand("montecarlo", "run a replication experiment");
  std::string mc_config, mc_out;
  int mc_reps = 0;
  mc->add_option("--config", mc_config, "experiment config file")->required();
  mc->add_option("--replications", mc_reps, "override replication count");
  mc->add_option("--out", mc_out, "override report path");

  // info
  auto* inf = app.add_subcommand("info", "Omega and standard-error tables");
  ModelFlags inf_mf;
  add_model_flags(inf, &inf_mf);
  std::vector<std::size_t> inf_ns;
  inf->add_option("--n", inf_ns, "sample sizes for the se table");

  // spectrum
  auto* spc = app.add_subcommand("spectrum", "spectral density samples");
  ModelFlags spc_mf;
  add_model_flags(spc, &spc_mf);
  int spc_grid = 512;
  std::string spc_out = "-";
  spc->add_option("--grid", spc_grid, "number of grid points on (0, pi]");
  spc->add_option("--out", spc_out, "output CSV path ('-' = stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(resolve_model(sim_mf, sim), sim_n, sim_seed,
                          sim_method, sim_out, sim_emit);
    if (est->parsed())
      return cmd_estimate(est_in, est_p, est_q, est_estimator,
                          est_mean == "on", est_out);
    if (mc->parsed()) return cmd_montecarlo(mc_config, mc_reps, mc_out);
    if (inf->parsed()) return cmd_info(resolve_model(inf_mf, inf), inf_ns);
    if (spc->parsed())
      return cmd_spectrum(resolve_model(spc_mf, spc), spc_grid, spc_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
