#pragma once

#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "monolab/numerics.hpp"

namespace monolab {

/// A point (J, H) in the image of the energy-momentum map.
struct EMValue {
  double j = 0.0;
  double h = 0.0;
};

/// "(j,h)=(..,..)" for messages.
std::string describe(EMValue em);

enum class SystemId {
  SphericalPendulum,
  ChampagneBottle,
  Resonance1m2,
  RadialScattering,
  FreeSphere,
  HarmonicOscillator2D,
};

struct SystemParams {
  double v0 = 1.0;     // bump height (radial scattering)
  double sigma = 1.0;  // bump width (radial scattering)
};

/// Box in a system's fixed-point search chart.
struct ChartBox {
  Vec lo;
  Vec hi;
};

/// An integrable system F = (H, J) with a Hamiltonian circle action
/// generated by J. Phase states are flat vectors (q_1..q_n, p_1..p_n);
/// the symplectic form is dq ^ dp.
class System {
 public:
  virtual ~System() = default;

  virtual SystemId id() const = 0;
  virtual std::string name() const = 0;
  /// Number of configuration coordinates n; the state has 2n entries.
  virtual int dof() const = 0;
  int dim() const { return 2 * dof(); }

  virtual double hamiltonian(const Vec& x) const = 0;
  virtual double momentum(const Vec& x) const = 0;
  virtual Vec grad_h(const Vec& x) const = 0;
  virtual Vec grad_j(const Vec& x) const = 0;

  EMValue energy_momentum(const Vec& x) const { return {momentum(x), hamiltonian(x)}; }

  /// Holonomic constraints g(x) = 0 (empty for systems on R^2n).
  virtual bool constrained() const { return false; }
  virtual Vec constraints(const Vec& x) const;
  virtual Mat constraint_jacobian(const Vec& x) const;
  /// Nearest admissible state; identity for unconstrained systems.
  virtual Vec project(const Vec& x) const { return x; }
  /// Throws ConstraintViolation unless |g(x)| <= tol and x is finite.
  void check_admissible(const Vec& x, double tol = 1e-10) const;

  /// Hamiltonian vector fields on the admissible manifold.
  virtual Vec vector_field_h(const Vec& x) const;
  Vec vector_field_j(const Vec& x) const;

  /// Closed-form time-`angle` map of the J-flow.
  virtual Vec j_flow(const Vec& x, double angle) const = 0;
  double circle_period() const;

  /// A J-invariant scalar used as a Poincare section for the reduced flow.
  virtual double section_value(const Vec& x) const = 0;

  /// Point on F^{-1}(em) lying on the reduced section at the midpoint of
  /// the section coordinate's range, moving in the increasing direction.
  /// Throws CriticalValue for singular or empty fibers.
  virtual Vec torus_seed(EMValue em) const;

  /// Orthonormal basis of the tangent space of the admissible manifold.
  Mat tangent_basis(const Vec& x) const;
  /// Singular values of dF restricted to the admissible tangent space.
  Eigen::Vector2d em_singular_values(const Vec& x) const;

  virtual Vec random_state(std::mt19937_64& rng) const;

  /// Parameterisation used for grid searches of fixed points.
  virtual int chart_dim() const { return dim(); }
  virtual Vec chart_to_state(const Vec& u) const { return u; }
  virtual ChartBox default_chart_box() const;
};

/// F(x) after checking the constraints; throws ConstraintViolation.
EMValue energy_momentum(const System& system, const Vec& x);

/// Largest |analytic - central-difference| component of grad H and grad J.
double gradient_check(const System& system, const Vec& x, double step = 1e-5);

/// {J, H} = dJ(X_H) on the admissible manifold.
double poisson_bracket(const System& system, const Vec& x);

std::unique_ptr<System> make_system(SystemId id, const SystemParams& params = {});
/// Accepts the CLI ids: spherical-pendulum, champagne-bottle, resonance-1-2,
/// radial-bump, free-sphere, oscillator-2d.
std::unique_ptr<System> make_system(std::string_view id, const SystemParams& params = {});
std::string system_id_string(SystemId id);
std::vector<SystemId> all_system_ids();

/// Planar system H = |p|^2/2 + V(|q|) with J = q1 p2 - q2 p1.
class CentralForceSystem : public System {
 public:
  int dof() const override { return 2; }
  double hamiltonian(const Vec& x) const override;
  double momentum(const Vec& x) const override;
  Vec grad_h(const Vec& x) const override;
  Vec grad_j(const Vec& x) const override;
  Vec j_flow(const Vec& x, double angle) const override;
  double section_value(const Vec& x) const override;
  Vec torus_seed(EMValue em) const override;
  Vec random_state(std::mt19937_64& rng) const override;

  virtual double potential(double r) const = 0;
  /// dV/dr
  virtual double potential_slope(double r) const = 0;
  /// 2 (h - V(r)) r^2 - j^2; positive where radial motion is allowed.
  double radial_function(double r, EMValue em) const;
  /// Radial turning points r_minus <= r_plus of the bounded oscillation
  /// containing the maximum of radial_function; r_minus = 0 when the motion
  /// passes through the centre (j = 0).
  std::pair<double, double> turning_points(EMValue em) const;
};

class SphericalPendulum : public System {
 public:
  explicit SphericalPendulum(double gravity = 1.0) : gravity_(gravity) {}
  SystemId id() const override {
    return gravity_ == 0.0 ? SystemId::FreeSphere : SystemId::SphericalPendulum;
  }
  std::string name() const override { return gravity_ == 0.0 ? "free-sphere" : "spherical-pendulum"; }
  int dof() const override { return 3; }
  double hamiltonian(const Vec& x) const override;
  double momentum(const Vec& x) const override;
  Vec grad_h(const Vec& x) const override;
  Vec grad_j(const Vec& x) const override;
  bool constrained() const override { return true; }
  Vec constraints(const Vec& x) const override;
  Mat constraint_jacobian(const Vec& x) const override;
  Vec project(const Vec& x) const override;
  Vec vector_field_h(const Vec& x) const override;
  Vec j_flow(const Vec& x, double angle) const override;
  double section_value(const Vec& x) const override { return x[2]; }
  Vec torus_seed(EMValue em) const override;
  Vec random_state(std::mt19937_64& rng) const override;
  int chart_dim() const override { return 4; }
  Vec chart_to_state(const Vec& u) const override;
  ChartBox default_chart_box() const override;

  double gravity() const { return gravity_; }
  /// Roots z_minus <= z_plus in [-1, 1] of P(z) = 2(h - g z)(1 - z^2) - j^2,
  /// plus the remaining root z3 (infinite when g = 0).
  struct Turning {
    double z_minus, z_plus, z_third;
  };
  Turning turning_points(EMValue em) const;
  /// State on the meridian y = 0 at height z with azimuthal velocity j / x.
  Vec meridian_state(EMValue em, double z, double sign_vz) const;

 private:
  double gravity_;
};

class ChampagneBottle : public CentralForceSystem {
 public:
  SystemId id() const override { return SystemId::ChampagneBottle; }
  std::string name() const override { return "champagne-bottle"; }
  double potential(double r) const override { return r * r * r * r - r * r; }
  double potential_slope(double r) const override { return 4.0 * r * r * r - 2.0 * r; }
};

class HarmonicOscillator2D : public CentralForceSystem {
 public:
  SystemId id() const override { return SystemId::HarmonicOscillator2D; }
  std::string name() const override { return "oscillator-2d"; }
  double potential(double r) const override { return 0.5 * r * r; }
  double potential_slope(double r) const override { return r; }
};

/// U(r) = v0 exp(-r^2 / sigma^2); v0 = 0 gives the free flow.
class RadialScattering : public CentralForceSystem {
 public:
  explicit RadialScattering(double v0 = 1.0, double sigma = 1.0) : v0_(v0), sigma_(sigma) {}
  SystemId id() const override { return SystemId::RadialScattering; }
  std::string name() const override { return "radial-bump"; }
  double potential(double r) const override;
  double potential_slope(double r) const override;
  Vec torus_seed(EMValue em) const override;
  double v0() const { return v0_; }
  double sigma() const { return sigma_; }

 private:
  double v0_;
  double sigma_;
};

/// H = 2 q1 p1 q2 + (q1^2 - p1^2) p2 + R^2, R = (q1^2 + p1^2)/2 + q2^2 + p2^2,
/// J = (q1^2 + p1^2)/2 - (q2^2 + p2^2). State order (q1, q2, p1, p2).
/// In z = p1 + i q1, w = p2 + i q2 the J-flow is (e^{it} z, e^{-2it} w).
class Resonance1m2 : public System {
 public:
  SystemId id() const override { return SystemId::Resonance1m2; }
  std::string name() const override { return "resonance-1-2"; }
  int dof() const override { return 2; }
  double hamiltonian(const Vec& x) const override;
  double momentum(const Vec& x) const override;
  Vec grad_h(const Vec& x) const override;
  Vec grad_j(const Vec& x) const override;
  Vec j_flow(const Vec& x, double angle) const override;
  /// |z|^2 / 2
  double section_value(const Vec& x) const override;
  Vec torus_seed(EMValue em) const override;
  Vec random_state(std::mt19937_64& rng) const override;

  /// Reduced-space function cos(psi) on the level (j, h) at pi1 = |z|^2/2,
  /// where psi = arg(z^2 w).
  static double reduced_cosine(double pi1, EMValue em);
  /// Range [pi_lo, pi_hi] of |z|^2/2 on the reduced level curve.
  static std::pair<double, double> reduced_range(EMValue em);
  /// State with |z|^2/2 = pi1, arg z = 0 and arg(z^2 w) = psi.
  static Vec reduced_state(double pi1, double psi, double j);
};

}  // namespace monolab
