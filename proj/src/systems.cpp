#include "monolab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "monolab/errors.hpp"

namespace monolab {

namespace {

constexpr double kPi = std::numbers::pi;

/// Root of f on [a, b] given opposite signs at the ends.
template <class F>
double bracketed_root(F f, double a, double b) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) {
    std::ostringstream msg;
    msg << "root not bracketed on [" << a << ", " << b << "]";
    throw Error(ErrorKind::Seeding, msg.str());
  }
  std::uintmax_t iters = 200;
  auto tol = [](double lo, double hi) { return std::abs(hi - lo) <= 4e-16 * std::max(1.0, std::abs(lo)); };
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
  return 0.5 * (r.first + r.second);
}

Vec canonical_field(const Vec& grad, int n) {
  Vec out(2 * n);
  out.head(n) = grad.tail(n);
  out.tail(n) = -grad.head(n);
  return out;
}

}  // namespace

std::string describe(EMValue em) {
  std::ostringstream s;
  s << "(j,h)=(" << em.j << "," << em.h << ")";
  return s.str();
}

// ---------------------------------------------------------------- System

Vec System::constraints(const Vec&) const { return Vec(0); }

Mat System::constraint_jacobian(const Vec&) const { return Mat(0, dim()); }

void System::check_admissible(const Vec& x, double tol) const {
  if (x.size() != dim()) throw Error(ErrorKind::InvalidInput, "state has wrong dimension for " + name());
  if (!x.allFinite()) throw Error(ErrorKind::InvalidInput, "state has non-finite entries");
  if (constrained()) {
    const Vec g = constraints(x);
    if (g.cwiseAbs().maxCoeff() > tol) {
      std::ostringstream msg;
      msg << name() << ": constraint residual " << g.cwiseAbs().maxCoeff() << " exceeds " << tol;
      throw Error(ErrorKind::ConstraintViolation, msg.str());
    }
  }
}

Vec System::vector_field_h(const Vec& x) const { return canonical_field(grad_h(x), dof()); }

Vec System::vector_field_j(const Vec& x) const { return canonical_field(grad_j(x), dof()); }

double System::circle_period() const { return 2.0 * kPi; }

Vec System::torus_seed(EMValue em) const {
  throw Error(ErrorKind::Unsupported, name() + " has no compact fibers to seed at " + describe(em));
}

Mat System::tangent_basis(const Vec& x) const {
  if (!constrained()) return Mat::Identity(dim(), dim());
  return null_space(constraint_jacobian(x));
}

Eigen::Vector2d System::em_singular_values(const Vec& x) const {
  Mat d(2, dim());
  d.row(0) = grad_h(x).transpose();
  d.row(1) = grad_j(x).transpose();
  const Mat restricted = d * tangent_basis(x);
  Eigen::JacobiSVD<Mat> svd(restricted);
  return svd.singularValues().head<2>();
}

Vec System::random_state(std::mt19937_64& rng) const {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec x(dim());
  for (auto& v : x) v = n01(rng);
  return project(x);
}

ChartBox System::default_chart_box() const {
  return {Vec::Constant(chart_dim(), -1.5), Vec::Constant(chart_dim(), 1.5)};
}

EMValue energy_momentum(const System& system, const Vec& x) {
  system.check_admissible(x);
  return system.energy_momentum(x);
}

double gradient_check(const System& system, const Vec& x, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidInput, "finite-difference step must be positive");
  const Vec gh = system.grad_h(x);
  const Vec gj = system.grad_j(x);
  double worst = 0.0;
  Vec y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + step;
    const double hp = system.hamiltonian(y), jp = system.momentum(y);
    y[i] = x[i] - step;
    const double hm = system.hamiltonian(y), jm = system.momentum(y);
    y[i] = x[i];
    worst = std::max(worst, std::abs((hp - hm) / (2.0 * step) - gh[i]));
    worst = std::max(worst, std::abs((jp - jm) / (2.0 * step) - gj[i]));
  }
  return worst;
}

double poisson_bracket(const System& system, const Vec& x) {
  return system.grad_j(x).dot(system.vector_field_h(x));
}

// ------------------------------------------------------------- factory

std::unique_ptr<System> make_system(SystemId id, const SystemParams& params) {
  switch (id) {
    case SystemId::SphericalPendulum: return std::make_unique<SphericalPendulum>(1.0);
    case SystemId::FreeSphere: return std::make_unique<SphericalPendulum>(0.0);
    case SystemId::ChampagneBottle: return std::make_unique<ChampagneBottle>();
    case SystemId::HarmonicOscillator2D: return std::make_unique<HarmonicOscillator2D>();
    case SystemId::RadialScattering:
      if (!(params.sigma > 0.0) || !std::isfinite(params.v0))
        throw Error(ErrorKind::InvalidInput, "radial-bump needs finite v0 and sigma > 0");
      return std::make_unique<RadialScattering>(params.v0, params.sigma);
    case SystemId::Resonance1m2: return std::make_unique<Resonance1m2>();
  }
  throw Error(ErrorKind::InvalidInput, "unknown system id");
}

std::string system_id_string(SystemId id) {
  switch (id) {
    case SystemId::SphericalPendulum: return "spherical-pendulum";
    case SystemId::FreeSphere: return "free-sphere";
    case SystemId::ChampagneBottle: return "champagne-bottle";
    case SystemId::HarmonicOscillator2D: return "oscillator-2d";
    case SystemId::RadialScattering: return "radial-bump";
    case SystemId::Resonance1m2: return "resonance-1-2";
  }
  return "unknown";
}

std::vector<SystemId> all_system_ids() {
  return {SystemId::SphericalPendulum, SystemId::ChampagneBottle,      SystemId::Resonance1m2,
          SystemId::RadialScattering,  SystemId::FreeSphere, SystemId::HarmonicOscillator2D};
}

std::unique_ptr<System> make_system(std::string_view id, const SystemParams& params) {
  for (SystemId s : all_system_ids())
    if (system_id_string(s) == id) return make_system(s, params);
  throw Error(ErrorKind::InvalidInput, "unknown system '" + std::string(id) + "'");
}

// -------------------------------------------------- CentralForceSystem

double CentralForceSystem::hamiltonian(const Vec& x) const {
  return 0.5 * x.tail<2>().squaredNorm() + potential(x.head<2>().norm());
}

double CentralForceSystem::momentum(const Vec& x) const { return x[0] * x[3] - x[1] * x[2]; }

Vec CentralForceSystem::grad_h(const Vec& x) const {
  const double r = x.head<2>().norm();
  // dV/dr / r stays finite at the centre for smooth radial potentials.
  const double slope_over_r =
      r > 1e-8 ? potential_slope(r) / r : (potential_slope(1e-8) - potential_slope(-1e-8)) / 2e-8;
  Vec g(4);
  g << slope_over_r * x[0], slope_over_r * x[1], x[2], x[3];
  return g;
}

Vec CentralForceSystem::grad_j(const Vec& x) const {
  Vec g(4);
  g << x[3], -x[2], -x[1], x[0];
  return g;
}

Vec CentralForceSystem::j_flow(const Vec& x, double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Vec y(4);
  y << c * x[0] - s * x[1], s * x[0] + c * x[1], c * x[2] - s * x[3], s * x[2] + c * x[3];
  return y;
}

double CentralForceSystem::section_value(const Vec& x) const { return x.head<2>().norm(); }

double CentralForceSystem::radial_function(double r, EMValue em) const {
  return 2.0 * (em.h - potential(r)) * r * r - em.j * em.j;
}

std::pair<double, double> CentralForceSystem::turning_points(EMValue em) const {
  auto g = [&](double r) { return radial_function(r, em); };
  double r_hi = 1.0;
  while (potential(r_hi) <= em.h + 1e-3) {
    r_hi *= 2.0;
    if (r_hi > 1e6) throw Error(ErrorKind::CriticalValue, name() + ": unbounded fiber at " + describe(em));
  }
  constexpr int kSamples = 4000;
  int best = 0;
  double gbest = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= kSamples; ++k) {
    const double v = g(r_hi * k / kSamples);
    if (v > gbest) {
      gbest = v;
      best = k;
    }
  }
  const double lo = r_hi * std::max(best - 1, 1) / kSamples * (best == 1 ? 1e-3 : 1.0);
  const double hi = r_hi * std::min(best + 1, kSamples) / kSamples;
  const auto top = boost::math::tools::brent_find_minima([&](double r) { return -g(r); }, lo, hi, 52);
  const double r_top = top.first;
  const double g_top = -top.second;
  if (!(g_top > 1e-13)) throw Error(ErrorKind::CriticalValue, name() + ": no regular fiber at " + describe(em));
  if (em.j == 0.0 && std::abs(em.h - potential(0.0)) < 1e-10 && std::abs(potential_slope(1e-12)) < 1e-9)
    throw Error(ErrorKind::CriticalValue, name() + ": fiber contains the central equilibrium at " + describe(em));
  double r_minus = 0.0;
  if (em.j != 0.0)
    r_minus = bracketed_root(g, 0.0, r_top);
  else if (em.h <= potential(0.0))
    r_minus = bracketed_root([&](double r) { return em.h - potential(r); }, 0.0, r_top);
  const double r_plus = bracketed_root(g, r_top, r_hi);
  if (r_plus - r_minus < 1e-9)
    throw Error(ErrorKind::CriticalValue, name() + ": degenerate radial oscillation at " + describe(em));
  return {r_minus, r_plus};
}

Vec CentralForceSystem::torus_seed(EMValue em) const {
  const auto [r_minus, r_plus] = turning_points(em);
  const double r = 0.5 * (r_minus + r_plus);
  const double pr = std::sqrt(std::max(radial_function(r, em), 0.0)) / r;
  Vec x(4);
  x << r, 0.0, pr, em.j / r;
  return x;
}

Vec CentralForceSystem::random_state(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  Vec x(4);
  for (auto& v : x) v = u(rng);
  return x;
}

double RadialScattering::potential(double r) const { return v0_ * std::exp(-r * r / (sigma_ * sigma_)); }

double RadialScattering::potential_slope(double r) const {
  return -2.0 * r / (sigma_ * sigma_) * potential(r);
}

Vec RadialScattering::torus_seed(EMValue em) const {
  throw Error(ErrorKind::Unsupported, "radial-bump fibers are non-compact; no torus at " + describe(em));
}

// --------------------------------------------------- SphericalPendulum

double SphericalPendulum::hamiltonian(const Vec& x) const {
  return 0.5 * x.tail<3>().squaredNorm() + gravity_ * x[2];
}

double SphericalPendulum::momentum(const Vec& x) const { return x[0] * x[4] - x[1] * x[3]; }

Vec SphericalPendulum::grad_h(const Vec& x) const {
  Vec g(6);
  g << 0.0, 0.0, gravity_, x[3], x[4], x[5];
  return g;
}

Vec SphericalPendulum::grad_j(const Vec& x) const {
  Vec g(6);
  g << x[4], -x[3], 0.0, -x[1], x[0], 0.0;
  return g;
}

Vec SphericalPendulum::constraints(const Vec& x) const {
  Vec g(2);
  g << x.head<3>().squaredNorm() - 1.0, x.head<3>().dot(x.tail<3>());
  return g;
}

Mat SphericalPendulum::constraint_jacobian(const Vec& x) const {
  Mat d(2, 6);
  d.row(0) << 2.0 * x[0], 2.0 * x[1], 2.0 * x[2], 0.0, 0.0, 0.0;
  d.row(1) << x[3], x[4], x[5], x[0], x[1], x[2];
  return d;
}

Vec SphericalPendulum::project(const Vec& x) const {
  Vec y = x;
  const Eigen::Vector3d q = x.head<3>().normalized();
  const Eigen::Vector3d p = x.tail<3>();
  y.head<3>() = q;
  y.tail<3>() = p - q.dot(p) * q;
  return y;
}

Vec SphericalPendulum::vector_field_h(const Vec& x) const {
  const Eigen::Vector3d q = x.head<3>();
  const Eigen::Vector3d p = x.tail<3>();
  // Multiplier of the constraint force keeping q . p = 0 on |q| = 1.
  const double lambda = p.squaredNorm() - gravity_ * q[2];
  Vec f(6);
  f.head<3>() = p;
  f.tail<3>() = -lambda * q;
  f[5] -= gravity_;
  return f;
}

Vec SphericalPendulum::j_flow(const Vec& x, double angle) const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Vec y = x;
  y[0] = c * x[0] - s * x[1];
  y[1] = s * x[0] + c * x[1];
  y[3] = c * x[3] - s * x[4];
  y[4] = s * x[3] + c * x[4];
  return y;
}

SphericalPendulum::Turning SphericalPendulum::turning_points(EMValue em) const {
  const double h = em.h;
  const double j2 = em.j * em.j;
  const double inf = std::numeric_limits<double>::infinity();
  if (gravity_ == 0.0) {
    if (!(2.0 * h - j2 > 1e-12))
      throw Error(ErrorKind::CriticalValue, "free-sphere: no regular fiber at " + describe(em));
    const double z = std::sqrt(1.0 - j2 / (2.0 * h));
    return {-z, z, inf};
  }
  const double g = gravity_;
  auto p = [&](double z) { return 2.0 * (h - g * z) * (1.0 - z * z) - j2; };
  const double z_top = (h - std::sqrt(h * h + 3.0 * g * g)) / (3.0 * g);
  if (z_top <= -1.0 || z_top >= 1.0 || !(p(z_top) > 1e-12))
    throw Error(ErrorKind::CriticalValue, name() + ": no regular fiber at " + describe(em));
  double z_minus, z_plus;
  if (em.j == 0.0) {
    z_minus = -1.0;
    z_plus = std::min(1.0, h / g);
  } else {
    z_minus = bracketed_root(p, -1.0, z_top);
    z_plus = bracketed_root(p, z_top, std::min(1.0, std::max(h / g, z_top + 1e-300)));
  }
  const double z_third = h / g - z_minus - z_plus;
  if (z_third - z_plus < 1e-9 || z_plus - z_minus < 1e-9)
    throw Error(ErrorKind::CriticalValue, name() + ": coincident turning points at " + describe(em));
  return {z_minus, z_plus, z_third};
}

Vec SphericalPendulum::meridian_state(EMValue em, double z, double sign_vz) const {
  const double x = std::sqrt(std::max(1.0 - z * z, 0.0));
  const double pz2 = 2.0 * (em.h - gravity_ * z) * (1.0 - z * z) - em.j * em.j;
  const double vz = std::copysign(std::sqrt(std::max(pz2, 0.0)), sign_vz);
  Vec s(6);
  s << x, 0.0, z, -z * vz / x, em.j / x, vz;
  return s;
}

Vec SphericalPendulum::torus_seed(EMValue em) const {
  const Turning t = turning_points(em);
  return meridian_state(em, 0.5 * (t.z_minus + t.z_plus), 1.0);
}

Vec SphericalPendulum::random_state(std::mt19937_64& rng) const {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec x(6);
  for (auto& v : x) v = n01(rng);
  return project(x);
}

Vec SphericalPendulum::chart_to_state(const Vec& u) const {
  const double th = u[0], ph = u[1];
  const Eigen::Vector3d q(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  const Eigen::Vector3d e_th(std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th));
  const Eigen::Vector3d e_ph(-std::sin(ph), std::cos(ph), 0.0);
  Vec x(6);
  x.head<3>() = q;
  x.tail<3>() = u[2] * e_th + u[3] * e_ph;
  return x;
}

ChartBox SphericalPendulum::default_chart_box() const {
  Vec lo(4), hi(4);
  lo << 0.0, 0.0, -1.5, -1.5;
  hi << kPi, 2.0 * kPi, 1.5, 1.5;
  return {lo, hi};
}

// -------------------------------------------------------- Resonance1m2

namespace {
double rho_of(const Vec& x) { return 0.5 * (x[0] * x[0] + x[2] * x[2]) + x[1] * x[1] + x[3] * x[3]; }
}  // namespace

double Resonance1m2::hamiltonian(const Vec& x) const {
  const double q1 = x[0], q2 = x[1], p1 = x[2], p2 = x[3];
  const double r = rho_of(x);
  return 2.0 * q1 * p1 * q2 + (q1 * q1 - p1 * p1) * p2 + r * r;
}

double Resonance1m2::momentum(const Vec& x) const {
  return 0.5 * (x[0] * x[0] + x[2] * x[2]) - (x[1] * x[1] + x[3] * x[3]);
}

Vec Resonance1m2::grad_h(const Vec& x) const {
  const double q1 = x[0], q2 = x[1], p1 = x[2], p2 = x[3];
  const double r = rho_of(x);
  Vec g(4);
  g << 2.0 * p1 * q2 + 2.0 * q1 * p2 + 2.0 * r * q1, 2.0 * q1 * p1 + 4.0 * r * q2,
      2.0 * q1 * q2 - 2.0 * p1 * p2 + 2.0 * r * p1, q1 * q1 - p1 * p1 + 4.0 * r * p2;
  return g;
}

Vec Resonance1m2::grad_j(const Vec& x) const {
  Vec g(4);
  g << x[0], -2.0 * x[1], x[2], -2.0 * x[3];
  return g;
}

Vec Resonance1m2::j_flow(const Vec& x, double angle) const {
  const std::complex<double> z(x[2], x[0]), w(x[3], x[1]);
  const std::complex<double> z1 = std::polar(1.0, angle) * z;
  const std::complex<double> w1 = std::polar(1.0, -2.0 * angle) * w;
  Vec y(4);
  y << z1.imag(), w1.imag(), z1.real(), w1.real();
  return y;
}

double Resonance1m2::section_value(const Vec& x) const { return 0.5 * (x[0] * x[0] + x[2] * x[2]); }

double Resonance1m2::reduced_cosine(double pi1, EMValue em) {
  const double a = 2.0 * pi1 - em.j;
  return (a * a - em.h) / (2.0 * pi1 * std::sqrt(pi1 - em.j));
}

std::pair<double, double> Resonance1m2::reduced_range(EMValue em) {
  if (em.j < 0.0 && std::abs(em.h - em.j * em.j) < 1e-10)
    throw Error(ErrorKind::CriticalValue, "resonance-1-2: fiber meets the Z2 orbit at " + describe(em));
  if (std::abs(em.j) < 1e-14 && std::abs(em.h) < 1e-12)
    throw Error(ErrorKind::CriticalValue, "resonance-1-2: origin is a fixed point");
  const double lo = std::max(0.0, em.j);
  auto c = [&](double p) { return reduced_cosine(p, em); };
  double hi = lo + 1.0;
  while (c(hi) <= 1.0) hi = lo + 2.0 * (hi - lo);
  // Quadratic spacing resolves level curves hugging the lower edge.
  constexpr int kSamples = 20000;
  auto at = [&](int k) {
    const double t = static_cast<double>(k) / kSamples;
    return lo + (hi - lo) * t * t;
  };
  int first = -1, last = -1;
  for (int k = 1; k <= kSamples; ++k) {
    if (std::abs(c(at(k))) <= 1.0) {
      if (first < 0) first = k;
      last = k;
    }
  }
  if (first < 0) throw Error(ErrorKind::CriticalValue, "resonance-1-2: empty fiber at " + describe(em));
  auto edge = [&](double inside, double outside) {
    const double target = c(outside) > 0.0 ? 1.0 : -1.0;
    return bracketed_root([&](double p) { return c(p) - target; }, std::min(inside, outside),
                          std::max(inside, outside));
  };
  const double a = first == 1 && std::abs(c(at(1) * 0.5 + lo * 0.5)) <= 1.0 ? lo : edge(at(first), at(first - 1));
  const double b = edge(at(last), at(std::min(last + 1, kSamples)));
  if (b - a < 1e-12) throw Error(ErrorKind::CriticalValue, "resonance-1-2: degenerate fiber at " + describe(em));
  return {a, b};
}

Vec Resonance1m2::reduced_state(double pi1, double psi, double j) {
  const double zr = std::sqrt(2.0 * pi1);
  const double wr = std::sqrt(std::max(pi1 - j, 0.0));
  Vec x(4);
  x << 0.0, wr * std::sin(psi), zr, wr * std::cos(psi);
  return x;
}

Vec Resonance1m2::torus_seed(EMValue em) const {
  const auto [a, b] = reduced_range(em);
  const double pi1 = 0.5 * (a + b);
  const double psi = std::acos(std::clamp(reduced_cosine(pi1, em), -1.0, 1.0));
  for (double sign : {1.0, -1.0}) {
    const Vec x = reduced_state(pi1, sign * psi, em.j);
    const Vec f = vector_field_h(x);
    if (x[0] * f[0] + x[2] * f[2] > 0.0) return x;
  }
  throw Error(ErrorKind::Seeding, "resonance-1-2: section is tangent to the flow at " + describe(em));
}

Vec Resonance1m2::random_state(std::mt19937_64& rng) const {
  std::normal_distribution<double> n(0.0, 0.5);
  Vec x(4);
  for (auto& v : x) v = n(rng);
  return x;
}

}  // namespace monolab
