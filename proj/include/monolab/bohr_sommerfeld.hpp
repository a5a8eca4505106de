#pragma once

#include "monolab/spectrum.hpp"

namespace monolab {

/// Action of the reduced oscillation on F^{-1}(em); 0 below the image.
/// Pendulum and free sphere: (1/pi) int sqrt(P(z)) / (1 - z^2) dz.
/// Central force: (1/pi) int sqrt(2 (h - V) r^2 - j^2) / r dr.
/// 1:(-2): enclosed reduced area / 2 pi, shifted by -j/2 where the level
/// surrounds the singular point of the reduced space.
double reduced_action(const System& system, EMValue em);

double pendulum_action(double gravity, EMValue em);
double central_action(const CentralForceSystem& system, EMValue em);
/// Reduced-space area enclosed by the level (j, h) of the 1:(-2) system.
double resonance_area(EMValue em);
double resonance_action(EMValue em);

struct BohrSommerfeldOptions {
  /// Maslov correction of the oscillation action.
  double mu1 = 0.5;
  /// Maslov correction of the rotation action.
  double mu2 = 0.0;
  /// Largest accepted |I1 - hbar (n + mu1)| at a lattice point.
  double residual_tol = 1e-9;
};

/// Points where I1 = hbar (n1 + mu1) and j = hbar (n2 + mu2) inside the window.
/// Targets falling into a jump of I1 are skipped.
SpectralLattice bohr_sommerfeld_lattice(const System& system, double hbar, const Window& window,
                                        const BohrSommerfeldOptions& options = {});

}  // namespace monolab
