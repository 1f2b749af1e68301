// Information matrix quadrature against the classical pure-fractional value,
// a Riemann-sum oracle, and the power-series route.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "longmem/asymptotics.hpp"
#include "longmem/css.hpp"
#include "longmem/parallel.hpp"
#include "longmem/simulation.hpp"
#include "longmem/stats.hpp"

using namespace longmem;

namespace {
constexpr double kPi2Over6 = 1.6449340668482264;
}

TEST_CASE("score integrand: delta entry values") {
  ParamVector theta{0.3, {}, {}};
  REQUIRE(score_vector_integrand(theta, std::numbers::pi)(0) ==
          Catch::Approx(std::log(4.0)).epsilon(1e-12));
  // |1 - e^{i lambda}| = 2 sin(lambda/2) equals 1 at lambda = pi/3,
  // where the delta entry crosses zero
  REQUIRE(score_vector_integrand(theta, std::numbers::pi / 3.0)(0) ==
          Catch::Approx(0.0).margin(1e-12));
  REQUIRE_THROWS_AS(score_vector_integrand(theta, 0.0), std::domain_error);
}

TEST_CASE("score integrand: AR entry matches finite differences of -2 log|alpha*|") {
  ParamVector theta{0.3, {0.6}, {}};
  const double lambda = 0.9;
  const auto g = score_vector_integrand(theta, lambda);
  const double h = 1e-7;
  auto neg2log = [&](double phi) {
    const std::complex<double> s(std::cos(lambda), std::sin(lambda));
    return -2.0 * std::log(std::abs(1.0 - phi * s));
  };
  const double fd = (neg2log(0.6 + h) - neg2log(0.6 - h)) / (2.0 * h);
  REQUIRE(g(1) == Catch::Approx(fd).epsilon(1e-6));
}

TEST_CASE("information matrix: pi^2/6 for the pure fractional model") {
  for (double d : {0.05, 0.25, 0.45}) {
    ParamVector theta{d, {}, {}};
    const auto info = information_matrix(theta);
    REQUIRE(info.omega.rows() == 1);
    REQUIRE(info.omega(0, 0) == Catch::Approx(kPi2Over6).margin(1e-6));
  }
}

TEST_CASE("information matrix: exact delta independence") {
  ParamVector a{0.1, {}, {}}, b{0.45, {}, {}};
  REQUIRE(information_matrix(a).omega(0, 0) ==
          information_matrix(b).omega(0, 0));
}

TEST_CASE("information matrix: off-diagonal against two independent routes") {
  ParamVector theta{0.3, {0.5}, {}};
  const auto info = information_matrix(theta);

  // route 1: power series. Omega_{d,phi} = sum_k phi^{k-1}/k = -log(1-phi)/phi,
  // Omega_{phi,phi} = 1/(1-phi^2); the delta entry stays pi^2/6.
  const double phi = 0.5;
  REQUIRE(info.omega(0, 0) == Catch::Approx(kPi2Over6).margin(1e-8));
  REQUIRE(info.omega(0, 1) ==
          Catch::Approx(-std::log(1.0 - phi) / phi).margin(1e-8));
  REQUIRE(info.omega(1, 1) ==
          Catch::Approx(1.0 / (1.0 - phi * phi)).margin(1e-8));

  // route 2: brute-force Riemann sum of the complex log-gradient outer
  // product on (1e-6, pi) with 10^6 uniform nodes
  const std::size_t nodes = 1'000'000;
  const double a = 1e-6;
  const double h = (std::numbers::pi - a) / double(nodes);
  double acc01 = 0.0;
  for (std::size_t i = 0; i < nodes; ++i) {
    const double lambda = a + (double(i) + 0.5) * h;
    const std::complex<double> s(std::cos(lambda), std::sin(lambda));
    const std::complex<double> wd = std::log(1.0 - s);
    const std::complex<double> wp = -s / (1.0 - phi * s);
    acc01 += std::real(wd * std::conj(wp));
  }
  acc01 *= h / std::numbers::pi;
  REQUIRE(info.omega(0, 1) == Catch::Approx(acc01).margin(1e-4));
}

TEST_CASE("information matrix: quadrature refinement is converged") {
  ParamVector theta{0.3, {0.5}, {-0.2}};
  const auto info = information_matrix(theta);
  REQUIRE(info.quad_error_estimate < 1e-8);
  REQUIRE(info.quad_nodes == 1024);
}

TEST_CASE("information matrix: symmetric positive definite on a parameter grid") {
  for (double d : {0.1, 0.25, 0.4})
    for (double phi : {-0.6, 0.0, 0.6})
      for (double psi : {-0.5, 0.0, 0.5}) {
        ParamVector theta{d, {phi}, {psi}};
        if (!validate(theta).ok()) continue;  // skip the common-root points
        if (phi == 0.0 && psi == 0.0) continue;  // origin handled below
        const auto info = information_matrix(theta);
        REQUIRE((info.omega - info.omega.transpose()).cwiseAbs().maxCoeff() <
                1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info.omega);
        REQUIRE(es.eigenvalues().minCoeff() > 0.0);
      }
}

TEST_CASE("information matrix: the ARMA(1,1) origin is flagged as singular") {
  // at phi_1 = psi_1 = 0 only phi_1 + psi_1 is locally identified, the two
  // log-gradient columns coincide, and the positive-definiteness assumption
  // fails; this must surface as a model error, not a silent matrix
  ParamVector theta{0.25, {0.0}, {0.0}};
  REQUIRE_THROWS_AS(information_matrix(theta), std::runtime_error);
}

TEST_CASE("standard errors: closed-form scaling") {
  ParamVector theta{0.3, {}, {}};
  const auto info = information_matrix(theta);
  const auto se1024 = standard_errors(info, 1024);
  REQUIRE(se1024[0] ==
          Catch::Approx(std::sqrt(6.0 / (std::numbers::pi * std::numbers::pi) / 1024.0))
              .epsilon(1e-6));
  const auto se4096 = standard_errors(info, 4096);
  REQUIRE(se4096[0] == Catch::Approx(0.5 * se1024[0]).epsilon(1e-12));

  const auto ci = ci95({0.3}, se1024);
  REQUIRE(ci[0].second - ci[0].first ==
          Catch::Approx(2.0 * 1.959964 * se1024[0]).epsilon(1e-12));
}

TEST_CASE("sample Hessian consistency: T_n(theta0)/(2 sigma2_hat) approaches Omega") {
  ModelSpec spec{{0, 0}, {0.3, {}, {}}, 1.0};
  const std::size_t n = 8192;
  const int R = 50;
  const auto gamma = autocovariance(spec, n - 1);
  std::vector<double> ratio(R);
  parallel_for(std::size_t(R), 0, [&](std::size_t r) {
    const auto ts =
        simulate_exact_gaussian_from_gamma(spec, gamma, n, substream(6060, n, r));
    const auto h = css_hessian(spec.theta, ts.values);
    const double s2 = css_objective(spec.theta, ts.values);
    ratio[r] = h(0, 0) / (2.0 * s2);
  });
  REQUIRE(median(ratio) == Catch::Approx(kPi2Over6).epsilon(0.10));
}

TEST_CASE("standard errors: singular omega is rejected") {
  InformationMatrix bad;
  bad.omega = Eigen::MatrixXd::Zero(2, 2);
  REQUIRE_THROWS_AS(standard_errors(bad, 128), std::runtime_error);
  REQUIRE_THROWS_AS(standard_errors(information_matrix({0.3, {}, {}}), 0),
                    std::invalid_argument);
}
