// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "monolab/bohr_sommerfeld.hpp"
#include "monolab/cell_transport.hpp"
#include "monolab/errors.hpp"
#include "monolab/figures.hpp"
#include "monolab/flow.hpp"
#include "monolab/fractional.hpp"
#include "monolab/report.hpp"
#include "monolab/scattering.hpp"

using namespace monolab;

namespace {

const RationalMatrix kOne = RationalMatrix::unipotent(Rational(1));
const RationalMatrix kHalf = RationalMatrix::unipotent(Rational(1, 2));

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int number, const std::string& title, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail << " [error: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.passed = false;
    o.detail << " [over budget " << budget_s << " s]";
  }
  if (!o.passed) ++failures;
  std::printf("%s %2d %s (%.1f s):%s\n", o.passed ? "PASS" : "FAIL", number, title.c_str(), secs, o.detail.str().c_str());
  std::fflush(stdout);
}

ErrorKind error_kind(const std::function<void()>& f, bool& threw) {
  threw = false;
  try {
    f();
  } catch (const Error& e) {
    threw = true;
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

}  // namespace

int main() {
  const SphericalPendulum pendulum;
  const LoopPath pendulum_loop = LoopPath::circle({0.0, 1.0}, 0.5);
  const LoopPath pendulum_contractible = LoopPath::circle({1.5, 2.5}, 0.3, 32);
  const Resonance1m2 resonance;
  const LoopPath resonance_loop = default_loop(resonance);
  const RadialScattering bump;
  const RadialScattering free_flow(0.0, 1.0);
  const LoopPath bump_loop = LoopPath::circle({0.0, 1.0}, 0.4);

  criterion(1, "pendulum rotation monodromy, |m-1| < 1e-3, budget 60 s", 60.0, [&](Outcome& o) {
    const MonodromyResult r = monodromy_by_rotation(pendulum, pendulum_loop);
    o.detail << " m_raw=" << format_double(r.m_raw) << " matrix=" << to_string(r.matrix);
    o.require(std::abs(r.m_raw - 1.0) < 1e-3, "|m - 1| < 1e-3");
    o.require(r.matrix == kOne, "matrix [[1,1],[0,1]]");
  });

  criterion(2, "fixed-point monodromy, one anti-Hopf point (1,-1), budget 10 s", 10.0, [&](Outcome& o) {
    const FixedPointMonodromy f = monodromy_by_fixed_points(pendulum, pendulum_loop);
    o.detail << " matrix=" << to_string(f.matrix) << " fixed_points=" << f.inside.size();
    o.require(f.matrix == kOne, "matrix [[1,1],[0,1]]");
    o.require(f.inside.size() == 1, "exactly one fixed point");
    if (f.inside.size() == 1) {
      o.detail << " weights=(" << f.inside[0].m << "," << f.inside[0].n << ") sign=" << f.inside[0].sign;
      o.require(f.inside[0].m == 1 && f.inside[0].n == -1 && f.inside[0].sign == 1, "anti-Hopf (1,-1)");
    }
  });

  criterion(3, "champagne bottle, both pipelines, budget 60 s", 60.0, [&](Outcome& o) {
    const ChampagneBottle champagne;
    const LoopPath loop = default_loop(champagne);
    const MonodromyResult r = monodromy_by_rotation(champagne, loop);
    const FixedPointMonodromy f = monodromy_by_fixed_points(champagne, loop);
    o.detail << " rotation=" << to_string(r.matrix) << " (m_raw=" << format_double(r.m_raw)
             << ") fixed_points=" << to_string(f.matrix);
    o.require(r.matrix == kOne && f.matrix == kOne, "both [[1,1],[0,1]]");
  });

  criterion(4, "Chern sequence (1,2) and exact gluing product", 0.0, [&](Outcome& o) {
    const auto levels = chern_sequence(pendulum, -2.0, 3.0);
    o.require(levels.size() == 2, "two levels");
    if (levels.size() == 2) {
      o.detail << " c=" << levels[0].chern << " on (" << levels[0].lo << "," << levels[0].hi << "), c=" << levels[1].chern
               << " on (" << levels[1].lo << "," << levels[1].hi << ")";
      o.require(levels[0].chern == 1 && std::abs(levels[0].hi - 1.0) < 1e-9, "c = 1 below h = 1");
      o.require(levels[1].chern == 2 && std::abs(levels[1].lo - 1.0) < 1e-9, "c = 2 above h = 1");
    }
    const RationalMatrix g = gluing_product(2, 1);
    o.detail << " gluing=" << to_string(g);
    o.require(g == kOne, "[[1,2],[0,1]] [[1,1],[0,1]]^-1 = [[1,1],[0,1]]");
  });

  criterion(5, "free sphere exact to 1e-10 (l <= 100, |m| <= 20), l_max doubling 1e-10, budget 30 s", 30.0,
            [&](Outcome& o) {
              SpectrumOptions free_opt;
              free_opt.gravity = 0.0;
              free_opt.l_max = 200;
              const SpectralLattice s = pendulum_joint_spectrum(1.0, -20, 20, 5100.0, free_opt);
              double err = 0.0;
              for (const auto& p : s.points) {
                const int l = std::abs(p.m) + p.n;
                if (l <= 100) err = std::max(err, std::abs(p.e - 0.5 * l * (l + 1.0)));
              }
              const Window w{-1.5, 1.5, -1.0, 2.5};
              const SpectralLattice a = pendulum_joint_spectrum(0.1, w);
              SpectrumOptions big;
              big.l_max = 400;
              const SpectralLattice b = pendulum_joint_spectrum(0.1, w, big);
              double drift = a.points.size() == b.points.size() ? 0.0 : 1.0;
              for (std::size_t i = 0; i < std::min(a.points.size(), b.points.size()); ++i)
                drift = std::max(drift, std::abs(a.points[i].e - b.points[i].e));
              o.detail << " free_error=" << format_double(err) << " doubling_change=" << format_double(drift);
              o.require(err < 1e-10, "free sphere error < 1e-10");
              o.require(drift < 1e-10, "l_max doubling < 1e-10");
            });

  criterion(6, "quantum cell transport at hbar = 0.1, 5 random cells, budget 60 s", 60.0, [&](Outcome& o) {
    const SpectralLattice q = pendulum_joint_spectrum(0.1, Window{-1.5, 1.5, -1.0, 2.5});
    const auto cells = cells_near_loop(q, pendulum_loop, 1, 0.5);
    o.require(cells.size() >= 5, "at least five valid cells");
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
    for (int k = 0; k < 5 && !cells.empty(); ++k) {
      const ElementaryCell& c = cells[pick(rng)];
      const CellTransportResult r = cell_transport(q, pendulum_loop, c);
      o.detail << " (" << c.m << "," << c.n << ")->" << to_string(r.matrix);
      o.require(r.matrix == kOne, "matrix [[1,1],[0,1]]");
    }
  });

  criterion(7, "Bohr-Sommerfeld vs quantum, deviation < 0.01 at hbar = 0.1 and smaller at 0.05", 0.0,
            [&](Outcome& o) {
              auto deviation = [&](double hbar) {
                const Window w{hbar, 1.5, -1.0, 2.5};
                const SpectralLattice q = pendulum_joint_spectrum(hbar, w);
                const SpectralLattice bs = bohr_sommerfeld_lattice(pendulum, hbar, w);
                std::map<std::pair<int, int>, double> e;
                for (const auto& p : q.points) e[{p.m, p.n}] = p.e;
                double dev = 0.0;
                for (const auto& p : bs.points)
                  if (auto it = e.find({p.m, p.n}); it != e.end()) dev = std::max(dev, std::abs(it->second - p.e));
                return dev;
              };
              const double d1 = deviation(0.1), d2 = deviation(0.05);
              o.detail << " dev(0.1)=" << format_double(d1) << " dev(0.05)=" << format_double(d2);
              o.require(d1 < 0.01, "deviation < 0.01");
              o.require(d2 < d1, "deviation decreases");
            });

  criterion(8, "fractional monodromy census and quotient, budget 60 s", 60.0, [&](Outcome& o) {
    const SeifertData d = isotropy_census(resonance, resonance_loop);
    const FractionalMatrix f = fractional_matrix(d);
    o.require(d.fixed_points.size() == 1, "one fixed point");
    if (!d.fixed_points.empty())
      o.require(d.fixed_points[0].m == 1 && d.fixed_points[0].n == -2, "weights (1,-2)");
    bool order2 = !d.exceptional_orders.empty();
    for (int k : d.exceptional_orders) order2 = order2 && k == 2;
    o.require(order2, "exceptional order 2");
    o.require(d.N == 2, "N = 2");
    o.require(abs(d.euler_number) == Rational(1, 2), "|e| = 1/2");
    o.require(f.matrix == kHalf, "fractional matrix [[1,1/2],[0,1]]");
    o.require(f.transport.rfind("2a0 -> 2a0 + b0", 0) == 0, "transport 2a0 -> 2a0 + b0");
    const QuotientResult q = quotient_monodromy(resonance, resonance_loop);
    o.require(q.quotient_matrix == kOne, "quotient [[1,1],[0,1]]");
    o.detail << " e=" << to_string(d.euler_number) << " N=" << d.N << " matrix=" << to_string(f.matrix) << " transport='"
             << f.transport << "' quotient=" << to_string(q.quotient_matrix) << " (m_raw=" << format_double(q.m_raw)
             << ")";
  });

  criterion(9, "double-cell transport on the 1:(-2) lattice (hbar = 0.001)", 0.0, [&](Outcome& o) {
    const SpectralLattice bs = bohr_sommerfeld_lattice(resonance, 0.001, Window{-0.1, 0.1, -0.03, 0.045});
    const ElementaryCell cell = default_cell(bs, resonance_loop, 2);
    const CellTransportResult two = cell_transport(bs, resonance_loop, cell, 2);
    o.detail << " cell=(" << cell.m << "," << cell.n << ") multiplier 2 -> " << to_string(two.matrix);
    o.require(two.matrix == kHalf, "multiplier 2 gives [[1,1/2],[0,1]]");
    bool threw = false;
    const ErrorKind k = error_kind([&] { cell_transport(bs, resonance_loop, cell, 1); }, threw);
    o.detail << "; multiplier 1 -> " << (threw ? std::string(to_string(k)) : std::string("no error"));
    o.require(threw && (k == ErrorKind::SnapFailure || k == ErrorKind::LatticeDefect),
              "multiplier 1 fails with a snap or defect error");
  });

  criterion(10, "scattering: free flow 1e-8, variation -1 +- 1e-2, matrix, methods 1e-5, budget 120 s", 120.0,
            [&](Outcome& o) {
              double free_err = 0.0;
              for (double j : {-1.0, -0.3, 0.2, 0.7, 2.0}) {
                const double expect = j > 0 ? 0.5 : -0.5;
                free_err = std::max(free_err, std::abs(deflection_angle(free_flow, {j, 1.0}).phi - expect));
                free_err = std::max(
                    free_err,
                    std::abs(deflection_angle(free_flow, {j, 1.0}, DeflectionMethod::Quadrature).phi - expect));
              }
              double method_gap = 0.0;
              for (EMValue em : {EMValue{0.5, 1.5}, EMValue{0.2, 0.7}, EMValue{-0.3, 1.2}})
                method_gap = std::max(method_gap, std::abs(deflection_angle(bump, em).phi -
                                                           deflection_angle(bump, em, DeflectionMethod::Quadrature).phi));
              const ScatteringMonodromy m = scattering_monodromy(bump, free_flow, bump_loop);
              o.detail << " free_error=" << format_double(free_err) << " method_gap=" << format_double(method_gap)
                       << " variation=" << format_double(m.variation) << " matrix=" << to_string(m.matrix)
                       << " map=" << to_string(m.map_matrix);
              o.require(free_err < 1e-8, "free flow sign(j)/2 to 1e-8");
              o.require(method_gap < 1e-5, "trajectory vs quadrature 1e-5");
              o.require(std::abs(m.variation + 1.0) < 1e-2, "variation -1 +- 1e-2");
              o.require(m.matrix == kOne, "matrix [[1,1],[0,1]]");
              o.require(m.map_matrix == kOne, "scattering map [[1,1],[0,1]]");
            });

  criterion(11, "properties: random states, contractible loops, orientation reversal", 0.0, [&](Outcome& o) {
    double bracket = 0.0, gradient = 0.0, commutation = 0.0, reversal = 0.0;
    for (SystemId id : all_system_ids()) {
      const auto s = make_system(id);
      std::mt19937_64 rng(1000 + static_cast<int>(id));
      for (int k = 0; k < 100; ++k) {
        const Vec x = s->random_state(rng);
        bracket = std::max(bracket, std::abs(poisson_bracket(*s, x)));
        gradient = std::max(gradient, gradient_check(*s, x, 1e-5));
        auto flow = [&](const Vec& y, bool backward) {
          FlowOptions f;
          f.backward = backward;
          return integrate(*s, y, 1.0, {}, f).final_state;
        };
        commutation = std::max(commutation, (s->j_flow(flow(x, false), 0.9) - flow(s->j_flow(x, 0.9), false)).norm());
        reversal = std::max(reversal, (flow(flow(x, false), true) - x).norm());
      }
    }
    o.detail << " bracket=" << format_double(bracket) << " gradient=" << format_double(gradient)
             << " commutation=" << format_double(commutation) << " reversal=" << format_double(reversal);
    o.require(bracket < 1e-9, "{H,J} < 1e-9");
    o.require(gradient < 1e-7, "gradients < 1e-7");
    o.require(commutation < 1e-8, "flow commutation < 1e-8");
    o.require(reversal < 1e-8, "time reversal < 1e-8");

    // Contractible loops.
    const SpectralLattice q = pendulum_joint_spectrum(0.1, Window{-1.5, 1.5, -1.0, 2.5});
    const LoopPath quiet = LoopPath::circle({1.0, 1.5}, 0.3);
    const bool c_rot = monodromy_by_rotation(pendulum, pendulum_contractible).matrix.is_identity();
    const bool c_fix = monodromy_by_fixed_points(pendulum, pendulum_contractible).matrix.is_identity();
    const bool c_cell = cell_transport(q, quiet, default_cell(q, quiet, 1)).matrix.is_identity();
    const bool c_census = fractional_matrix(isotropy_census(pendulum, pendulum_contractible)).matrix.is_identity();
    const bool c_quot = quotient_monodromy(pendulum, pendulum_contractible).quotient_matrix.is_identity();
    const ScatteringMonodromy c_sc = scattering_monodromy(bump, free_flow, LoopPath::circle({0.5, 2.0}, 0.3, 32));
    const bool c_scat = c_sc.matrix.is_identity() && c_sc.map_matrix.is_identity();
    o.detail << " contractible(rotation,fixed,cell,census,quotient,scattering)=" << c_rot << c_fix << c_cell << c_census
             << c_quot << c_scat;
    o.require(c_rot && c_fix && c_cell && c_census && c_quot && c_scat, "contractible loops give the identity");

    // Orientation reversal.
    auto inverts = [](const RationalMatrix& fwd, const RationalMatrix& back) {
      return (fwd * back).is_identity() && !fwd.is_identity();
    };
    const LoopPath pr = pendulum_loop.reversed();
    const bool r_rot = inverts(monodromy_by_rotation(pendulum, pendulum_loop).matrix,
                               monodromy_by_rotation(pendulum, pr).matrix);
    const bool r_fix = inverts(monodromy_by_fixed_points(pendulum, pendulum_loop).matrix,
                               monodromy_by_fixed_points(pendulum, pr).matrix);
    const ElementaryCell cell = default_cell(q, pendulum_loop, 1);
    const bool r_cell =
        inverts(cell_transport(q, pendulum_loop, cell).matrix, cell_transport(q, pr, cell).matrix);
    const bool r_census = inverts(fractional_matrix(isotropy_census(resonance, resonance_loop)).matrix,
                                  fractional_matrix(isotropy_census(resonance, resonance_loop.reversed())).matrix);
    const bool r_quot = inverts(quotient_monodromy(resonance, resonance_loop).quotient_matrix,
                                quotient_monodromy(resonance, resonance_loop.reversed()).quotient_matrix);
    const ScatteringMonodromy fwd = scattering_monodromy(bump, free_flow, bump_loop);
    const ScatteringMonodromy back = scattering_monodromy(bump, free_flow, bump_loop.reversed());
    const bool r_scat = inverts(fwd.matrix, back.matrix) && inverts(fwd.map_matrix, back.map_matrix);
    o.detail << " reversal(rotation,fixed,cell,census,quotient,scattering)=" << r_rot << r_fix << r_cell << r_census
             << r_quot << r_scat;
    o.require(r_rot && r_fix && r_cell && r_census && r_quot && r_scat, "reversal inverts every matrix");
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
