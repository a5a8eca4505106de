#include "monolab/numerics.hpp"

#include <cmath>
#include <numbers>

namespace monolab {

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double step) {
  const Vec f0 = f(x);
  Mat jac(f0.size(), x.size());
  Vec xp = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double h = step * std::max(1.0, std::abs(x[k]));
    xp[k] = x[k] + h;
    const Vec fp = f(xp);
    xp[k] = x[k] - h;
    const Vec fm = f(xp);
    xp[k] = x[k];
    jac.col(k) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

NewtonResult gauss_newton(const std::function<Vec(const Vec&)>& residual, Vec x0, double tol, int max_iter,
                          const std::function<Mat(const Vec&)>& jacobian) {
  NewtonResult out;
  out.x = std::move(x0);
  Vec r = residual(out.x);
  out.residual = r.norm();
  for (int it = 0; it < max_iter && std::isfinite(out.residual); ++it) {
    if (out.residual < tol) {
      out.converged = true;
      return out;
    }
    const Mat jac = jacobian ? jacobian(out.x) : fd_jacobian(residual, out.x);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(jac);
    cod.setThreshold(1e-13);
    Vec step = cod.solve(-r);
    // Backtrack so that the residual never grows.
    double lambda = 1.0;
    for (int ls = 0; ls < 30; ++ls) {
      const Vec trial = out.x + lambda * step;
      const Vec rt = residual(trial);
      if (std::isfinite(rt.norm()) && rt.norm() < out.residual * (1.0 - 1e-4 * lambda)) {
        out.x = trial;
        r = rt;
        break;
      }
      lambda *= 0.5;
      if (ls == 29) {
        out.iterations = it + 1;
        out.converged = out.residual < tol;
        return out;
      }
    }
    out.residual = r.norm();
    out.iterations = it + 1;
  }
  out.converged = out.residual < tol;
  return out;
}

Mat null_space(const Mat& a, double rel_tol) {
  if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > rel_tol * std::max(1.0, smax)) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

double wrap_pi(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(angle + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

double frac01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double nearest_branch(double x, double ref) { return x + std::round(ref - x); }

}  // namespace monolab
