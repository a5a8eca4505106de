#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "monolab/report.hpp"

namespace monolab {

enum class Command { Bifurcation, Monodromy, Spectrum, CellTransport, Fractional, Scattering, ReproduceFigures, Selftest };
std::string to_string(Command c);
/// Throws InvalidInput for unknown names.
Command parse_command(const std::string& name);

struct LoopSpec {
  /// "circle" or "ellipse".
  std::string shape = "circle";
  EMValue center;
  double radius = 0.0;
  double semi_h = 0.0;
  double semi_j = 0.0;
  int samples = 64;
  Orientation orientation = Orientation::Ccw;

  LoopPath path() const;
};

/// Everything a run depends on. Unset optional fields take per-system
/// defaults in resolve().
struct RunConfig {
  Command command = Command::Selftest;
  std::string system;
  double v0 = 1.0;
  double sigma = 1.0;
  std::optional<LoopSpec> loop;
  /// monodromy: rotation | fixed-point | both; fractional: census | quotient | both;
  /// scattering: trajectory | quadrature.
  std::string method;
  /// spectrum / cell-transport: quantum | bohr-sommerfeld.
  std::string lattice;
  double hbar = 0.0;
  int multiplier = 0;
  std::optional<std::array<int, 2>> cell;
  std::optional<Window> window;
  int resolution = 40;
  double rtol = 1e-12;
  double atol = 1e-12;
  double drift_gate = 1e-9;
  std::string out_dir;
  /// json | csv | svg | all
  std::string format = "json";
  std::uint64_t seed = 1;
};

Json to_json(const RunConfig& c);
/// Throws InvalidInput on unknown keys, wrong types or invalid values.
RunConfig config_from_json(const Json& j);

/// Checks ranges and names; throws InvalidInput.
void validate(const RunConfig& c);
/// Fills per-system defaults (system, loop, window, hbar, method, ...).
RunConfig resolve(const RunConfig& c);

struct RunOutcome {
  /// 0: all gates passed; 1: pipeline error or failed gate; 2: bad config.
  int exit_code = 0;
  Json report;
  /// File name -> content, filtered by the config's format.
  std::map<std::string, std::string> files;
  /// Wall-clock seconds per stage; kept out of the report for determinism.
  Json timings;
};

RunOutcome run(const RunConfig& config);

/// Writes outcome.files and the timings sidecar under config.out_dir.
void write_outputs(const RunConfig& config, const RunOutcome& outcome);

}  // namespace monolab
