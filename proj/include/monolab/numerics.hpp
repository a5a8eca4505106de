#pragma once

#include <functional>

#include <Eigen/Dense>

namespace monolab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Central-difference Jacobian of a vector function.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double step = 1e-6);

struct NewtonResult {
  Vec x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Gauss-Newton with minimum-norm steps; handles under- and
/// over-determined systems. The Jacobian comes from central differences
/// unless one is supplied.
NewtonResult gauss_newton(const std::function<Vec(const Vec&)>& residual, Vec x0, double tol = 1e-12,
                          int max_iter = 50,
                          const std::function<Mat(const Vec&)>& jacobian = nullptr);

/// Orthonormal basis (columns) of the null space of `a`.
Mat null_space(const Mat& a, double rel_tol = 1e-12);

/// Wraps an angle to (-pi, pi].
double wrap_pi(double angle);

/// Representative of x modulo 1 in [0, 1).
double frac01(double x);

/// Representative of x modulo 1 closest to `ref`.
double nearest_branch(double x, double ref);

}  // namespace monolab
