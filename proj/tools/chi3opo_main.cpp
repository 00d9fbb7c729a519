// Command-line front end: parameter sweeps for classical branches, output
// noise spectra witnesses, and the stochastic cross-check.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chi3opo/sweep.hpp"

namespace {

struct FlagSet {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string f2, delta_p, d3;  // scalar or start:stop:count
  double omega = 0.0;
  double gamma_ratio = 0.0;
  std::uint64_t seed = 0;
  int trajectories = 0;
  double duration = 0.0;
  double transient = 0.0;
  double dt = 0.0;

  CLI::Option* omega_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* traj_opt = nullptr;
  CLI::Option* duration_opt = nullptr;
  CLI::Option* transient_opt = nullptr;
  CLI::Option* dt_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--config", f.config_path, "key = value sweep config file");
  cmd->add_option("--out", f.out_path, "output path (stdout when omitted)");
  cmd->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--f2", f.f2, "pump power: value or start:stop:count");
  cmd->add_option("--delta-p", f.delta_p, "pump detuning: value or start:stop:count");
  cmd->add_option("--d3", f.d3, "dispersion: value or start:stop:count");
  f.omega_opt = cmd->add_option("--omega", f.omega, "analysis frequency (default 0.015)");
  f.gamma_opt =
      cmd->add_option("--gamma-ratio", f.gamma_ratio, "coupling fraction (default 0.55)");
  f.seed_opt = cmd->add_option("--seed", f.seed, "stochastic-oracle master seed");
  f.traj_opt = cmd->add_option("--trajectories", f.trajectories, "oracle ensemble size");
  f.duration_opt = cmd->add_option("--duration", f.duration, "oracle measured span");
  f.transient_opt = cmd->add_option("--transient", f.transient, "oracle discarded span");
  f.dt_opt = cmd->add_option("--dt", f.dt, "oracle time step (<= 0.01)");
}

chi3opo::SweepConfig build_config(const FlagSet& f, const std::string& mode) {
  chi3opo::SweepConfig cfg;
  if (!f.config_path.empty()) cfg = chi3opo::parse_config_file(f.config_path);
  cfg.mode = chi3opo::sweep_mode_from_string(mode);
  if (!f.f2.empty()) chi3opo::apply_override(cfg, "f2", f.f2);
  if (!f.delta_p.empty()) chi3opo::apply_override(cfg, "delta_p", f.delta_p);
  if (!f.d3.empty()) chi3opo::apply_override(cfg, "d3", f.d3);
  if (f.omega_opt->count() > 0) cfg.fixed.omega = f.omega;
  if (f.gamma_opt->count() > 0) cfg.fixed.gamma_ratio = f.gamma_ratio;
  if (f.seed_opt->count() > 0) cfg.oracle.seed = f.seed;
  if (f.traj_opt->count() > 0) cfg.oracle.n_trajectories = f.trajectories;
  if (f.duration_opt->count() > 0) cfg.oracle.duration = f.duration;
  if (f.transient_opt->count() > 0) cfg.oracle.transient = f.transient;
  if (f.dt_opt->count() > 0) cfg.oracle.dt = f.dt;
  if (!f.format.empty()) cfg.format = f.format;
  if (!f.out_path.empty()) cfg.output_path = f.out_path;
  return cfg;
}

int run_mode(const FlagSet& f, const std::string& mode) {
  const chi3opo::SweepConfig cfg = build_config(f, mode);
  const chi3opo::FigureDataset d = chi3opo::run_sweep(cfg);
  const std::string text =
      cfg.format == "json" ? chi3opo::render_json(d) : chi3opo::render_csv(d);
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    if (cfg.format == "json") {
      chi3opo::emit_json(d, cfg.output_path);
    } else {
      chi3opo::emit_csv(d, cfg.output_path);
    }
    std::cout << "wrote " << cfg.output_path << " (" << d.rows.size() << " rows)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-mode Kerr parametric oscillator: steady states, output noise "
               "spectra, and entanglement witnesses"};
  app.require_subcommand(1);

  struct Verb {
    const char* name;
    const char* mode;  // sweep mode; nullptr => verify
    const char* help;
  };
  const Verb verbs[] = {
      {"steady", "steady", "classical branches over a parameter grid"},
      {"duan", "duan", "two-mode witness sweep"},
      {"duan-rot", "duan_rotated", "rotated two-mode witness sweep"},
      {"vlf", "vlf", "three-partition witness sweep"},
      {"oracle", "oracle", "stochastic vs analytic spectra over a grid"},
      {"verify", nullptr, "invariant suite + stochastic cross-check at one point"},
  };

  FlagSet flags[6];
  int status = 0;
  for (int i = 0; i < 6; ++i) {
    CLI::App* cmd = app.add_subcommand(verbs[i].name, verbs[i].help);
    add_common_flags(cmd, flags[i]);
    const Verb& verb = verbs[i];
    FlagSet& f = flags[i];
    cmd->callback([&f, &verb, &status]() {
      if (verb.mode == nullptr) {
        const chi3opo::SweepConfig cfg = build_config(f, "oracle");
        status = chi3opo::verify_point(cfg, std::cout);
      } else {
        status = run_mode(f, verb.mode);
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
