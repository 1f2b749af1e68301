// Bounded quasi-Newton minimizer.
//
// Coordinates are mapped onto their boxes by a logistic reparametrization
// (theta = lo + (hi-lo) sigmoid(z)), BFGS runs unconstrained in z, and line
// search is Armijo backtracking. Objectives may return +inf for points the
// box alone cannot exclude (root-margin violations at higher ARMA orders);
// backtracking then shortens the step. Everything is deterministic: same
// inputs, same iterate sequence, bit for bit.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace longmem {

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tol = 1e-8;  // infinity norm in original coordinates
  double step_tol = 1e-10;     // infinity norm of the parameter step
  double armijo_c1 = 1e-4;
  int max_backtracks = 60;
};

struct BfgsOutcome {
  std::vector<double> theta;
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> gradient;  // original coordinates, at theta
  int iterations = 0;
  bool converged = false;  // gradient criterion met
};

// Objective contract: f(theta, grad_out) returns the value; fills grad_out
// (same length as theta) unless grad_out is null. Returning +inf marks an
// inadmissible point; the gradient is not consulted there.
using BoxedObjective =
    std::function<double(const std::vector<double>&, std::vector<double>*)>;

namespace detail {

inline double logistic(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double logit(double r) { return std::log(r / (1.0 - r)); }

}  // namespace detail

class BoxedBfgs {
 public:
  BoxedBfgs(std::vector<std::pair<double, double>> bounds, BfgsOptions opts = {})
      : bounds_(std::move(bounds)), opts_(opts) {}

  BfgsOutcome minimize(const BoxedObjective& f,
                       const std::vector<double>& start) const {
    const int d = int(bounds_.size());
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) {
      const auto [lo, hi] = bounds_[i];
      double r = (start[std::size_t(i)] - lo) / (hi - lo);
      r = std::clamp(r, 1e-12, 1.0 - 1e-12);
      z(i) = detail::logit(r);
    }

    std::vector<double> theta(static_cast<std::size_t>(d)), grad(static_cast<std::size_t>(d));
    Eigen::VectorXd g(d), gz(d);
    to_theta(z, theta);
    double fv = f(theta, &grad);
    BfgsOutcome out;
    out.theta = theta;
    out.value = fv;
    out.gradient = grad;
    if (!std::isfinite(fv)) return out;  // start must be admissible
    chain(z, grad, gz);

    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d);  // inverse Hessian
    std::vector<double> theta_new(static_cast<std::size_t>(d)), grad_new(static_cast<std::size_t>(d));

    for (int iter = 0; iter < opts_.max_iterations; ++iter) {
      out.iterations = iter + 1;
      if (inf_norm(grad) < opts_.gradient_tol) {
        out.converged = true;
        break;
      }
      Eigen::VectorXd dir = -(h * gz);
      double slope = gz.dot(dir);
      if (!(slope < 0.0)) {  // not a descent direction; reset curvature
        h.setIdentity();
        dir = -gz;
        slope = gz.dot(dir);
      }

      double alpha = 1.0;
      double fnew = std::numeric_limits<double>::infinity();
      Eigen::VectorXd znew;
      bool accepted = false;
      for (int bt = 0; bt < opts_.max_backtracks; ++bt) {
        znew = z + alpha * dir;
        clamp_z(znew);
        to_theta(znew, theta_new);
        fnew = f(theta_new, nullptr);  // value only while backtracking
        if (std::isfinite(fnew) &&
            fnew <= fv + opts_.armijo_c1 * alpha * slope) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;  // line search exhausted
      fnew = f(theta_new, &grad_new);

      double step = 0.0;
      for (int i = 0; i < d; ++i)
        step = std::max(step, std::abs(theta_new[std::size_t(i)] -
                                       theta[std::size_t(i)]));

      Eigen::VectorXd gznew(d);
      chain(znew, grad_new, gznew);
      const Eigen::VectorXd s = znew - z;
      const Eigen::VectorXd y = gznew - gz;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd vmat =
            Eigen::MatrixXd::Identity(d, d) - rho * s * y.transpose();
        h = vmat * h * vmat.transpose() + rho * s * s.transpose();
      }

      z = znew;
      theta = theta_new;
      grad = grad_new;
      gz = gznew;
      fv = fnew;
      out.theta = theta;
      out.value = fv;
      out.gradient = grad;

      if (step < opts_.step_tol) {
        out.converged = inf_norm(grad) < opts_.gradient_tol;
        break;
      }
      if (inf_norm(grad) < opts_.gradient_tol) {
        out.iterations = iter + 1;
        out.converged = true;
        break;
      }
    }
    return out;
  }

 private:
  static double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  void to_theta(const Eigen::VectorXd& z, std::vector<double>& theta) const {
    for (int i = 0; i < z.size(); ++i) {
      const auto [lo, hi] = bounds_[std::size_t(i)];
      theta[std::size_t(i)] = lo + (hi - lo) * detail::logistic(z(i));
    }
  }

  // d theta_i / d z_i, for converting gradients to z coordinates
  void chain(const Eigen::VectorXd& z, const std::vector<double>& grad_theta,
             Eigen::VectorXd& grad_z) const {
    for (int i = 0; i < z.size(); ++i) {
      const auto [lo, hi] = bounds_[std::size_t(i)];
      const double sig = detail::logistic(z(i));
      grad_z(i) = grad_theta[std::size_t(i)] * (hi - lo) * sig * (1.0 - sig);
    }
  }

  static void clamp_z(Eigen::VectorXd& z) {
    for (int i = 0; i < z.size(); ++i) z(i) = std::clamp(z(i), -40.0, 40.0);
  }

  std::vector<std::pair<double, double>> bounds_;
  BfgsOptions opts_;
};

}  // namespace longmem
