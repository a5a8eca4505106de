#include "monolab/bohr_sommerfeld.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "monolab/errors.hpp"
#include "monolab/parallel.hpp"

namespace monolab {

namespace {

constexpr double kPi = std::numbers::pi;

/// int_a^b f with the endpoint square roots removed by x = c + d sin(u).
template <class F>
double sine_substituted(F f, double a, double b, double tol = 1e-13) {
  const double c = 0.5 * (a + b), d = 0.5 * (b - a);
  auto g = [&](double u) { return f(c + d * std::sin(u)) * d * std::cos(u); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, -0.5 * kPi, 0.5 * kPi, 15, tol);
}

/// Real roots of a quartic with coefficients c[0] s^4 + ... + c[4], polished.
std::vector<double> quartic_real_roots(const std::array<double, 5>& c) {
  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i) comp(0, i) = -c[i + 1] / c[0];
  for (int i = 1; i < 4; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
  auto poly = [&](double s) { return (((c[0] * s + c[1]) * s + c[2]) * s + c[3]) * s + c[4]; };
  auto dpoly = [&](double s) { return ((4.0 * c[0] * s + 3.0 * c[1]) * s + 2.0 * c[2]) * s + c[3]; };
  std::vector<double> out;
  for (int i = 0; i < 4; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, std::abs(z))) continue;
    double s = z.real();
    for (int k = 0; k < 3; ++k) {
      const double dp = dpoly(s);
      if (dp == 0.0) break;
      s -= poly(s) / dp;
    }
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double pendulum_action(double gravity, EMValue em) {
  const SphericalPendulum system(gravity);
  SphericalPendulum::Turning t;
  try {
    t = system.turning_points(em);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CriticalValue) throw;
    // Below the image the action vanishes; on its boundary as well.
    return 0.0;
  }
  const double j2 = em.j * em.j;
  auto integrand = [&](double z) {
    const double p = 2.0 * (em.h - gravity * z) * (1.0 - z * z) - j2;
    const double w = 1.0 - z * z;
    return p > 0.0 && w > 0.0 ? std::sqrt(p) / w : 0.0;
  };
  return sine_substituted(integrand, t.z_minus, t.z_plus) / kPi;
}

double central_action(const CentralForceSystem& system, EMValue em) {
  std::pair<double, double> t;
  try {
    t = system.turning_points(em);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CriticalValue) throw;
    return 0.0;
  }
  auto integrand = [&](double r) {
    const double g = system.radial_function(r, em);
    if (r <= 0.0) return std::sqrt(std::max(2.0 * (em.h - system.potential(0.0)), 0.0));
    return g > 0.0 ? std::sqrt(g) / r : 0.0;
  };
  return sine_substituted(integrand, t.first, t.second) / kPi;
}

double resonance_area(EMValue em) {
  const double j = em.j, h = em.h;
  // With s = sqrt(pi1 - j): C <= 1 where p(s) <= 0 and C >= -1 where q(s) >= 0.
  const std::array<double, 5> p{4.0, -2.0, 4.0 * j, -2.0 * j, j * j - h};
  const std::array<double, 5> q{4.0, 2.0, 4.0 * j, 2.0 * j, j * j - h};
  const double s_lo = std::sqrt(std::max(0.0, -j));
  std::vector<double> cuts{s_lo};
  for (const auto& c : {p, q})
    for (double r : quartic_real_roots(c))
      if (r > s_lo) cuts.push_back(r);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto cosine = [&](double s) {
    const double num = (2.0 * s * s + j) * (2.0 * s * s + j) - h;
    const double den = 2.0 * (s * s + j) * s;
    if (den <= 0.0) return num > 0.0 ? 2.0 : -2.0;
    return num / den;
  };
  auto integrand = [&](double s) { return std::acos(std::clamp(cosine(s), -1.0, 1.0)) * 2.0 * s; };
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= 0.0) continue;
    const double mid = cosine(0.5 * (a + b));
    if (mid >= 1.0) continue;
    if (mid <= -1.0) {
      area += kPi * (b * b - a * a);
      continue;
    }
    area += sine_substituted(integrand, a, b, 1e-10);
  }
  return area;
}

double resonance_action(EMValue em) {
  double action = resonance_area(em) / (2.0 * kPi);
  if (em.j < 0.0 && em.h > em.j * em.j) action -= 0.5 * em.j;
  return action;
}

double reduced_action(const System& system, EMValue em) {
  if (!std::isfinite(em.j) || !std::isfinite(em.h)) throw Error(ErrorKind::InvalidInput, "non-finite value");
  if (const auto* pend = dynamic_cast<const SphericalPendulum*>(&system)) return pendulum_action(pend->gravity(), em);
  if (dynamic_cast<const RadialScattering*>(&system))
    throw Error(ErrorKind::Unsupported, "radial-bump fibers are non-compact; use the radial action difference");
  if (const auto* cf = dynamic_cast<const CentralForceSystem*>(&system)) return central_action(*cf, em);
  if (dynamic_cast<const Resonance1m2*>(&system)) return resonance_action(em);
  throw Error(ErrorKind::Unsupported, system.name() + ": no reduced action available");
}

SpectralLattice bohr_sommerfeld_lattice(const System& system, double hbar, const Window& window,
                                        const BohrSommerfeldOptions& options) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error(ErrorKind::InvalidInput, "hbar must be positive");
  if (!(window.j_hi > window.j_lo) || !(window.h_hi > window.h_lo))
    throw Error(ErrorKind::InvalidInput, "empty window");
  const int n2_lo = static_cast<int>(std::ceil(window.j_lo / hbar - options.mu2 - 1e-9));
  const int n2_hi = static_cast<int>(std::floor(window.j_hi / hbar - options.mu2 + 1e-9));
  const int columns = std::max(0, n2_hi - n2_lo + 1);
  std::vector<std::vector<SpectralPoint>> found(columns);
  parallel_for(static_cast<std::size_t>(columns), [&](std::size_t i) {
    const int n2 = n2_lo + static_cast<int>(i);
    const double j = hbar * (n2 + options.mu2);
    auto action = [&](double h) { return reduced_action(system, {j, h}); };
    const double a_lo = action(window.h_lo), a_hi = action(window.h_hi);
    const int n1_lo = std::max(0, static_cast<int>(std::ceil(a_lo / hbar - options.mu1)));
    const int n1_hi = static_cast<int>(std::floor(a_hi / hbar - options.mu1));
    double h_lo = window.h_lo;
    for (int n1 = n1_lo; n1 <= n1_hi; ++n1) {
      const double target = hbar * (n1 + options.mu1);
      auto f = [&](double h) { return action(h) - target; };
      const double fa = f(h_lo), fb = a_hi - target;
      if (fa > 0.0 || fb < 0.0) continue;
      std::uintmax_t iters = 200;
      auto tol = [](double a, double b) { return b - a <= 1e-14 * std::max(1.0, std::abs(a)); };
      const auto r = boost::math::tools::toms748_solve(f, h_lo, window.h_hi, fa, fb, tol, iters);
      const double h = 0.5 * (r.first + r.second);
      h_lo = r.first;
      if (std::abs(f(h)) > options.residual_tol) continue;  // target inside a jump of the action
      found[i].push_back({j, h, n2, n1});
    }
  });
  SpectralLattice out;
  out.hbar = hbar;
  out.kind = LatticeKind::BohrSommerfeld;
  out.system = system.name();
  for (auto& col : found)
    for (auto& pnt : col) out.points.push_back(pnt);
  return out;
}

}  // namespace monolab
