#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "monolab/bifurcation.hpp"
#include "monolab/tridiagonal.hpp"

namespace monolab {

enum class LatticeKind { Quantum, BohrSommerfeld };
std::string to_string(LatticeKind kind);

struct SpectralPoint {
  double j = 0.0;
  double e = 0.0;
  /// Column index: j = hbar * m.
  int m = 0;
  /// Position within the column, counted upward from the lowest level.
  int n = 0;
};

struct SpectralLattice {
  std::vector<SpectralPoint> points;
  double hbar = 0.0;
  LatticeKind kind = LatticeKind::Quantum;
  std::string system;

  /// Points of column m sorted by energy.
  std::vector<SpectralPoint> column(int m) const;
};

/// CSV with header j,e,m,n. Reading restores hbar from the column spacing.
void write_lattice_csv(const SpectralLattice& lattice, std::ostream& out);
SpectralLattice read_lattice_csv(std::istream& in);

/// Fixed-m matrix of -hbar^2/2 Laplacian + gravity * z in the spherical
/// harmonic basis, degrees |m| .. l_max.
Tridiagonal pendulum_block(double hbar, int m, int l_max, double gravity = 1.0);

/// <l+1, m| z |l, m> for normalized spherical harmonics.
double z_matrix_element(int l, int m);

struct SpectrumOptions {
  double gravity = 1.0;
  /// 0 picks a degree well above the classically allowed range.
  int l_max = 0;
  /// Accepted change of every eigenvalue when l_max is doubled.
  double convergence_tol = 1e-10;
};

/// Joint spectrum points (hbar m, E) with E <= e_max for m_lo <= m <= m_hi.
/// Throws Truncation if doubling l_max moves an eigenvalue by more than the
/// tolerance.
SpectralLattice pendulum_joint_spectrum(double hbar, int m_lo, int m_hi, double e_max,
                                        const SpectrumOptions& options = {});

/// Same, restricted to a window.
SpectralLattice pendulum_joint_spectrum(double hbar, const Window& window, const SpectrumOptions& options = {});

}  // namespace monolab
