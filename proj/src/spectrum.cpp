#include "monolab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "monolab/errors.hpp"
#include "monolab/parallel.hpp"

namespace monolab {

std::string to_string(LatticeKind kind) { return kind == LatticeKind::Quantum ? "quantum" : "bohr-sommerfeld"; }

std::vector<SpectralPoint> SpectralLattice::column(int m) const {
  std::vector<SpectralPoint> out;
  for (const auto& p : points)
    if (p.m == m) out.push_back(p);
  std::sort(out.begin(), out.end(), [](const SpectralPoint& a, const SpectralPoint& b) { return a.e < b.e; });
  return out;
}

void write_lattice_csv(const SpectralLattice& lattice, std::ostream& out) {
  out << "j,e,m,n\n";
  out.precision(17);
  for (const auto& p : lattice.points) out << p.j << ',' << p.e << ',' << p.m << ',' << p.n << '\n';
}

SpectralLattice read_lattice_csv(std::istream& in) {
  SpectralLattice lattice;
  std::string line;
  if (!std::getline(in, line) || line.rfind("j,e,m,n", 0) != 0)
    throw Error(ErrorKind::InvalidInput, "lattice CSV must start with the header j,e,m,n");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream s(line);
    SpectralPoint p;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(s >> p.j >> c1 >> p.e >> c2 >> p.m >> c3 >> p.n) || c1 != ',' || c2 != ',' || c3 != ',')
      throw Error(ErrorKind::InvalidInput, "malformed lattice CSV at line " + std::to_string(lineno));
    lattice.points.push_back(p);
  }
  if (lattice.points.empty()) throw Error(ErrorKind::InvalidInput, "lattice CSV has no points");
  double hbar = 0.0;
  for (const auto& p : lattice.points)
    if (p.m != 0) {
      hbar = p.j / p.m;
      break;
    }
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidInput, "lattice CSV does not determine hbar");
  lattice.hbar = hbar;
  return lattice;
}

double z_matrix_element(int l, int m) {
  const double num = static_cast<double>((l + 1) * (l + 1) - m * m);
  const double den = static_cast<double>((2 * l + 1) * (2 * l + 3));
  return std::sqrt(num / den);
}

Tridiagonal pendulum_block(double hbar, int m, int l_max, double gravity) {
  const int l0 = std::abs(m);
  if (l_max < l0) throw Error(ErrorKind::InvalidInput, "l_max below |m|");
  Tridiagonal t;
  for (int l = l0; l <= l_max; ++l) {
    t.diag.push_back(0.5 * hbar * hbar * l * (l + 1.0));
    if (l < l_max) t.off.push_back(gravity * z_matrix_element(l, m));
  }
  return t;
}

namespace {

int auto_l_max(double hbar, double e_max, double gravity) {
  // Degree where the kinetic term alone exceeds the energy window by a wide margin.
  const double kin = std::max(e_max + std::abs(gravity), 0.0) + 1.0;
  const int l_classical = static_cast<int>(std::ceil(std::sqrt(2.0 * kin) / hbar));
  return 2 * l_classical + 40;
}

}  // namespace

SpectralLattice pendulum_joint_spectrum(double hbar, int m_lo, int m_hi, double e_max, const SpectrumOptions& options) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw Error(ErrorKind::InvalidInput, "hbar must be positive");
  if (m_hi < m_lo) throw Error(ErrorKind::InvalidInput, "empty m range");
  const int l_max = options.l_max > 0 ? options.l_max : auto_l_max(hbar, e_max, options.gravity);
  const double e_lo = -std::abs(options.gravity) - 1.0;
  const int count = m_hi - m_lo + 1;
  std::vector<std::vector<double>> cols(count);
  std::vector<double> worst(count, 0.0);
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t i) {
    const int m = m_lo + static_cast<int>(i);
    if (std::abs(m) > l_max) return;
    const Tridiagonal t = pendulum_block(hbar, m, l_max, options.gravity);
    cols[i] = t.eigenvalues(e_lo, e_max);
    const Tridiagonal t2 = pendulum_block(hbar, m, 2 * l_max, options.gravity);
    for (std::size_t k = 0; k < cols[i].size(); ++k) worst[i] = std::max(worst[i], std::abs(t2.eigenvalue(k) - cols[i][k]));
  });
  const double dev = *std::max_element(worst.begin(), worst.end());
  if (dev > options.convergence_tol) {
    std::ostringstream msg;
    msg << "eigenvalues moved by " << dev << " when doubling l_max = " << l_max << "; try l_max = " << 2 * l_max;
    throw Error(ErrorKind::Truncation, msg.str());
  }
  SpectralLattice out;
  out.hbar = hbar;
  out.kind = LatticeKind::Quantum;
  out.system = options.gravity == 0.0 ? "free-sphere" : "spherical-pendulum";
  for (int i = 0; i < count; ++i) {
    const int m = m_lo + i;
    for (std::size_t k = 0; k < cols[i].size(); ++k)
      out.points.push_back({hbar * m, cols[i][k], m, static_cast<int>(k)});
  }
  return out;
}

SpectralLattice pendulum_joint_spectrum(double hbar, const Window& window, const SpectrumOptions& options) {
  if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidInput, "hbar must be positive");
  const int m_lo = static_cast<int>(std::ceil(window.j_lo / hbar - 1e-9));
  const int m_hi = static_cast<int>(std::floor(window.j_hi / hbar + 1e-9));
  SpectralLattice all = pendulum_joint_spectrum(hbar, m_lo, m_hi, window.h_hi, options);
  std::erase_if(all.points, [&](const SpectralPoint& p) { return p.e < window.h_lo; });
  return all;
}

}  // namespace monolab
