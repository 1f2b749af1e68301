// FARIMA(p, delta, q) model specification and admissibility checks.
//
// Conventions (fixed for the whole library):
//   AR polynomial  phi(s) = 1 - phi_1 s - ... - phi_p s^p
//   MA polynomial  psi(s) = 1 + psi_1 s + ... + psi_q s^q
//   model          phi(B) (1-B)^delta x_t = psi(B) eps_t
// so the AR(inf) transfer function is alpha(s) = (1-s)^delta phi(s)/psi(s).
// The parameter vector is laid out theta = (delta, phi_1..phi_p, psi_1..psi_q).
//
// Admissible region: 0 < delta < 1/2; all roots of phi and psi of modulus
// >= 1 + kRootMargin; phi and psi share no root (identifiability).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace longmem {

inline constexpr double kRootMargin = 0.01;
inline constexpr double kDeltaLower = 0.001;  // optimization box for delta
inline constexpr double kDeltaUpper = 0.499;

struct ModelOrder {
  int p = 0;
  int q = 0;
  int dim() const { return p + q + 1; }
  bool operator==(const ModelOrder&) const = default;
};

struct ParamVector {
  double delta = 0.25;
  std::vector<double> ar;  // phi_1..phi_p
  std::vector<double> ma;  // psi_1..psi_q

  ModelOrder order() const { return {int(ar.size()), int(ma.size())}; }
  int dim() const { return int(ar.size() + ma.size()) + 1; }

  std::vector<double> flatten() const {
    std::vector<double> v;
    v.reserve(std::size_t(dim()));
    v.push_back(delta);
    v.insert(v.end(), ar.begin(), ar.end());
    v.insert(v.end(), ma.begin(), ma.end());
    return v;
  }

  static ParamVector from_flat(const ModelOrder& order,
                               const std::vector<double>& v) {
    if (v.size() != std::size_t(order.dim()))
      throw std::invalid_argument("ParamVector: flat size mismatch");
    ParamVector theta;
    theta.delta = v[0];
    theta.ar.assign(v.begin() + 1, v.begin() + 1 + order.p);
    theta.ma.assign(v.begin() + 1 + order.p, v.end());
    return theta;
  }

  bool operator==(const ParamVector&) const = default;
};

struct ModelSpec {
  ModelOrder order;
  ParamVector theta;
  double sigma2 = 1.0;
};

namespace detail {

// Coefficients of the AR polynomial 1 - sum phi_i s^i.
inline std::vector<double> ar_poly(const std::vector<double>& phi) {
  std::vector<double> c(phi.size() + 1);
  c[0] = 1.0;
  for (std::size_t i = 0; i < phi.size(); ++i) c[i + 1] = -phi[i];
  return c;
}

// Coefficients of the MA polynomial 1 + sum psi_i s^i.
inline std::vector<double> ma_poly(const std::vector<double>& psi) {
  std::vector<double> c(psi.size() + 1);
  c[0] = 1.0;
  for (std::size_t i = 0; i < psi.size(); ++i) c[i + 1] = psi[i];
  return c;
}

// Roots of c_0 + c_1 s + ... + c_d s^d via the companion matrix; trailing
// coefficients below 1e-14 are trimmed first.
inline std::vector<std::complex<double>> poly_roots(std::vector<double> c) {
  while (c.size() > 1 && std::abs(c.back()) < 1e-14) c.pop_back();
  const std::size_t d = c.size() - 1;
  std::vector<std::complex<double>> roots;
  if (d == 0) return roots;
  if (d == 1) {
    roots.emplace_back(-c[0] / c[1], 0.0);
    return roots;
  }
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(Eigen::Index(d), Eigen::Index(d));
  for (std::size_t i = 0; i + 1 < d; ++i) comp(Eigen::Index(i + 1), Eigen::Index(i)) = 1.0;
  for (std::size_t i = 0; i < d; ++i)
    comp(Eigen::Index(i), Eigen::Index(d - 1)) = -c[i] / c[d];
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    roots.push_back(es.eigenvalues()(i));
  return roots;
}

inline double min_root_modulus(const std::vector<double>& poly) {
  const auto roots = poly_roots(poly);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : roots) m = std::min(m, std::abs(r));
  return m;  // +inf when the polynomial is constant
}

// Resultant of two polynomials via the Sylvester matrix, normalized by
// coefficient norms so the common-root tolerance is scale-free.
inline double normalized_resultant(std::vector<double> a, std::vector<double> b) {
  while (a.size() > 1 && std::abs(a.back()) < 1e-14) a.pop_back();
  while (b.size() > 1 && std::abs(b.back()) < 1e-14) b.pop_back();
  const std::size_t da = a.size() - 1, db = b.size() - 1;
  if (da == 0 || db == 0) return std::numeric_limits<double>::infinity();
  const std::size_t n = da + db;
  Eigen::MatrixXd syl = Eigen::MatrixXd::Zero(Eigen::Index(n), Eigen::Index(n));
  for (std::size_t r = 0; r < db; ++r)
    for (std::size_t k = 0; k <= da; ++k)
      syl(Eigen::Index(r), Eigen::Index(r + k)) = a[da - k];
  for (std::size_t r = 0; r < da; ++r)
    for (std::size_t k = 0; k <= db; ++k)
      syl(Eigen::Index(db + r), Eigen::Index(r + k)) = b[db - k];
  const double det = syl.partialPivLu().determinant();
  double na = 0.0, nb = 0.0;
  for (double v : a) na = std::max(na, std::abs(v));
  for (double v : b) nb = std::max(nb, std::abs(v));
  const double scale = std::pow(na, double(db)) * std::pow(nb, double(da));
  return std::abs(det) / (scale > 0 ? scale : 1.0);
}

}  // namespace detail

struct ValidationReport {
  bool delta_in_range = false;
  bool ar_roots_outside = false;
  bool ma_roots_outside = false;
  bool no_common_root = false;
  bool sigma2_positive = true;
  bool orders_consistent = true;
  std::vector<std::string> failures;

  bool ok() const {
    return delta_in_range && ar_roots_outside && ma_roots_outside &&
           no_common_root && sigma2_positive && orders_consistent;
  }
  std::string message() const {
    std::string m;
    for (const auto& f : failures) {
      if (!m.empty()) m += "; ";
      m += f;
    }
    return m.empty() ? "ok" : m;
  }
};

inline ValidationReport validate(const ParamVector& theta) {
  ValidationReport rep;
  rep.delta_in_range = theta.delta > 0.0 && theta.delta < 0.5;
  if (!rep.delta_in_range)
    rep.failures.push_back("memory parameter delta must lie in the open interval (0, 0.5)");

  const double ar_min = detail::min_root_modulus(detail::ar_poly(theta.ar));
  rep.ar_roots_outside = ar_min >= 1.0 + kRootMargin - 1e-12;
  if (!rep.ar_roots_outside)
    rep.failures.push_back("AR polynomial has a root inside the margin circle");

  const double ma_min = detail::min_root_modulus(detail::ma_poly(theta.ma));
  rep.ma_roots_outside = ma_min >= 1.0 + kRootMargin - 1e-12;
  if (!rep.ma_roots_outside)
    rep.failures.push_back("MA polynomial has a root inside the margin circle");

  const double res = detail::normalized_resultant(detail::ar_poly(theta.ar),
                                                  detail::ma_poly(theta.ma));
  rep.no_common_root = res > 1e-8;
  if (!rep.no_common_root)
    rep.failures.push_back("AR and MA polynomials share a root (model not identifiable)");
  return rep;
}

inline ValidationReport validate(const ModelSpec& spec) {
  ValidationReport rep = validate(spec.theta);
  rep.sigma2_positive = spec.sigma2 > 0.0;
  if (!rep.sigma2_positive)
    rep.failures.push_back("innovation variance sigma2 must be positive");
  rep.orders_consistent = spec.order.p == int(spec.theta.ar.size()) &&
                          spec.order.q == int(spec.theta.ma.size());
  if (!rep.orders_consistent)
    rep.failures.push_back("order (p, q) does not match coefficient lengths");
  return rep;
}

inline void require_valid(const ParamVector& theta) {
  const auto rep = validate(theta);
  if (!rep.ok()) throw std::invalid_argument("invalid model parameters: " + rep.message());
}

inline void require_valid(const ModelSpec& spec) {
  const auto rep = validate(spec);
  if (!rep.ok()) throw std::invalid_argument("invalid model: " + rep.message());
}

// Optimization box. Delta is always [kDeltaLower, kDeltaUpper]; a lone AR or
// MA coefficient gets the exact margin interval, higher orders get a loose
// box and rely on root-margin rejection inside the objective.
struct ParamBounds {
  std::pair<double, double> delta{kDeltaLower, kDeltaUpper};
  std::vector<std::pair<double, double>> arma;

  static ParamBounds defaults(const ModelOrder& order) {
    ParamBounds b;
    const double single = 1.0 / (1.0 + kRootMargin) - 1e-4;
    for (int i = 0; i < order.p; ++i)
      b.arma.emplace_back(order.p == 1 ? -single : -1.995,
                          order.p == 1 ? single : 1.995);
    for (int i = 0; i < order.q; ++i)
      b.arma.emplace_back(order.q == 1 ? -single : -1.995,
                          order.q == 1 ? single : 1.995);
    return b;
  }

  std::vector<std::pair<double, double>> flatten() const {
    std::vector<std::pair<double, double>> v;
    v.push_back(delta);
    v.insert(v.end(), arma.begin(), arma.end());
    return v;
  }
};

// --- plain-text key-value serialization --------------------------------
//
// Keys are part of the CLI contract:
//   order.p, order.q, theta.delta, theta.ar, theta.ma, sigma2
// theta.ar / theta.ma hold comma-separated coefficient lists (empty allowed).

inline std::map<std::string, std::string> model_to_kv(const ModelSpec& spec) {
  std::map<std::string, std::string> kv;
  auto join = [](const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ", ";
      os << v[i];
    }
    return os.str();
  };
  std::ostringstream del, sig;
  del.precision(17);
  sig.precision(17);
  del << spec.theta.delta;
  sig << spec.sigma2;
  kv["order.p"] = std::to_string(spec.order.p);
  kv["order.q"] = std::to_string(spec.order.q);
  kv["theta.delta"] = del.str();
  kv["theta.ar"] = join(spec.theta.ar);
  kv["theta.ma"] = join(spec.theta.ma);
  kv["sigma2"] = sig.str();
  return kv;
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    // trim
    const auto b = cur.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = cur.find_last_not_of(" \t");
    out.push_back(std::stod(cur.substr(b, e - b + 1)));
  }
  return out;
}

inline ModelSpec model_from_kv(const std::map<std::string, std::string>& kv) {
  ModelSpec spec;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (const auto* v = get("theta.delta")) spec.theta.delta = std::stod(*v);
  else throw std::invalid_argument("model config: missing theta.delta");
  if (const auto* v = get("theta.ar")) spec.theta.ar = parse_double_list(*v);
  if (const auto* v = get("theta.ma")) spec.theta.ma = parse_double_list(*v);
  if (const auto* v = get("sigma2")) spec.sigma2 = std::stod(*v);
  spec.order.p = int(spec.theta.ar.size());
  spec.order.q = int(spec.theta.ma.size());
  if (const auto* v = get("order.p")) {
    if (std::stoi(*v) != spec.order.p)
      throw std::invalid_argument("model config: order.p disagrees with theta.ar length");
  }
  if (const auto* v = get("order.q")) {
    if (std::stoi(*v) != spec.order.q)
      throw std::invalid_argument("model config: order.q disagrees with theta.ma length");
  }
  return spec;
}

}  // namespace longmem
