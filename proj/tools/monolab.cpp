#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "monolab/run.hpp"

using namespace monolab;

namespace {

std::vector<double> parse_list(const std::string& text, std::size_t count, const std::string& flag) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw Error(ErrorKind::InvalidInput, flag + " expects numbers, got '" + text + "'");
    out.push_back(v);
  }
  if (out.size() != count)
    throw Error(ErrorKind::InvalidInput, flag + " expects " + std::to_string(count) + " comma-separated values");
  return out;
}

struct LoopFlags {
  std::string center;
  double radius = 0.0;
  double semi_h = 0.0;
  double semi_j = 0.0;
  int samples = 0;
  bool cw = false;
};

struct CommandFlags {
  std::string system;
  double v0 = 1.0;
  double sigma = 1.0;
  LoopFlags loop;
  std::string method;
  std::string lattice;
  double hbar = 0.0;
  int multiplier = 0;
  std::string cell;
  std::string window;
  int resolution = 40;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* sub, CommandFlags& f) {
  sub->add_option("--system", f.system,
                  "spherical-pendulum | champagne-bottle | resonance-1-2 | radial-bump | free-sphere | oscillator-2d");
  sub->add_option("--v0", f.v0, "bump height (radial-bump)");
  sub->add_option("--sigma", f.sigma, "bump width (radial-bump)");
  sub->add_option("--center,--loop-center", f.loop.center, "loop centre j,h");
  sub->add_option("--radius", f.loop.radius, "circular loop radius");
  sub->add_option("--semi-h", f.loop.semi_h, "elliptic loop semi-axis along h");
  sub->add_option("--semi-j", f.loop.semi_j, "elliptic loop semi-axis along j");
  sub->add_option("--samples", f.loop.samples, "initial loop samples");
  sub->add_flag("--cw", f.loop.cw, "clockwise loop");
  sub->add_option("--method", f.method, "pipeline choice");
  sub->add_option("--lattice", f.lattice, "quantum | bohr-sommerfeld | path to a lattice CSV");
  sub->add_option("--hbar", f.hbar, "Planck constant of the lattice");
  sub->add_option("--multiplier", f.multiplier, "cell multiplier along the oscillation edge");
  sub->add_option("--cell", f.cell, "cell base m,n");
  sub->add_option("--window", f.window, "j_lo,j_hi,h_lo,h_hi");
  sub->add_option("--resolution", f.resolution, "seed grid per axis for critical values");
  sub->add_option("--seed", f.seed, "random seed");
}

RunConfig build_config(Command command, const CommandFlags& f) {
  RunConfig c;
  c.command = command;
  c.system = f.system;
  c.v0 = f.v0;
  c.sigma = f.sigma;
  c.method = f.method;
  c.lattice = f.lattice;
  c.hbar = f.hbar;
  c.multiplier = f.multiplier;
  c.resolution = f.resolution;
  c.seed = f.seed;
  if (!f.cell.empty()) {
    const auto v = parse_list(f.cell, 2, "--cell");
    c.cell = std::array<int, 2>{static_cast<int>(v[0]), static_cast<int>(v[1])};
  }
  if (!f.window.empty()) {
    const auto v = parse_list(f.window, 4, "--window");
    c.window = Window{v[0], v[1], v[2], v[3]};
  }
  const LoopFlags& l = f.loop;
  if (!l.center.empty()) {
    const auto v = parse_list(l.center, 2, "--center");
    LoopSpec s;
    s.center = {v[0], v[1]};
    if (l.semi_h > 0.0 || l.semi_j > 0.0) {
      s.shape = "ellipse";
      s.semi_h = l.semi_h;
      s.semi_j = l.semi_j;
    } else {
      s.radius = l.radius;
    }
    c.loop = s;
  } else if (l.radius != 0.0 || l.semi_h != 0.0 || l.semi_j != 0.0) {
    throw Error(ErrorKind::InvalidInput, "loop size given without --center");
  }
  if (l.samples != 0 || l.cw) {
    if (!c.loop) c.loop = resolve(c).loop;
    if (!c.loop) throw Error(ErrorKind::InvalidInput, "this command takes no loop");
    if (l.samples != 0) c.loop->samples = l.samples;
    if (l.cw) c.loop->orientation = Orientation::Cw;
  }
  return c;
}

int fail_config(const std::string& message) {
  std::cout << error_report("invalid-config", message).dump(2) << std::endl;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monodromy invariants of integrable Hamiltonian systems"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  double rtol = 1e-12, atol = 1e-12, drift_gate = 1e-9;
  std::string out_dir, format = "json", config_path;
  bool dump_config = false;
  auto* o_rtol = app.add_option("--rtol", rtol, "relative integration tolerance");
  auto* o_atol = app.add_option("--atol", atol, "absolute integration tolerance");
  auto* o_drift = app.add_option("--drift-gate", drift_gate, "largest tolerated drift of H and J");
  auto* o_out = app.add_option("--out-dir", out_dir, "directory for report files");
  auto* o_format = app.add_option("--format", format, "json | csv | svg | all");
  app.add_option("--config", config_path, "run configuration JSON");
  app.add_flag("--dump-config", dump_config, "print the resolved configuration and exit");

  CommandFlags flags;
  std::map<CLI::App*, Command> commands;
  const std::vector<std::pair<std::string, std::string>> subs{
      {"bifurcation", "critical values of F in a window"},
      {"monodromy", "classical monodromy along a loop"},
      {"spectrum", "quantum or Bohr-Sommerfeld joint spectrum"},
      {"cell-transport", "lattice cell transport along a loop"},
      {"fractional", "isotropy census and quotient monodromy"},
      {"scattering", "deflection angle and scattering monodromy"},
      {"reproduce-figures", "figure bundle and invariant summary"},
      {"selftest", "quick consistency checks"}};
  for (const auto& [name, help] : subs) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    commands[sub] = parse_command(name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail_config(e.what());
  }

  RunConfig config;
  try {
    std::optional<Command> chosen;
    for (const auto& [sub, cmd] : commands)
      if (sub->parsed()) chosen = cmd;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) return fail_config("cannot read config file " + config_path);
      Json j;
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        return fail_config(std::string("config is not valid JSON: ") + e.what());
      }
      config = config_from_json(j);
      if (chosen && *chosen != config.command)
        return fail_config("subcommand does not match the config's command");
    } else {
      if (!chosen) return fail_config("a subcommand or --config is required");
      config = build_config(*chosen, flags);
    }
    if (config_path.empty() || o_rtol->count()) config.rtol = rtol;
    if (config_path.empty() || o_atol->count()) config.atol = atol;
    if (config_path.empty() || o_drift->count()) config.drift_gate = drift_gate;
    if (config_path.empty() || o_out->count()) config.out_dir = out_dir;
    if (config_path.empty() || o_format->count()) config.format = format;
    if (dump_config) {
      std::cout << to_json(resolve(config)).dump(2) << std::endl;
      return 0;
    }
  } catch (const Error& e) {
    return fail_config(e.what());
  }

  const RunOutcome outcome = run(config);
  std::cout << outcome.report.dump(2) << std::endl;
  try {
    write_outputs(config, outcome);
  } catch (const Error& e) {
    std::cerr << e.what() << std::endl;
    return 1;
  }
  return outcome.exit_code;
}
