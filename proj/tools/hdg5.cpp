// Command-line driver: solve, convergence study, superconvergence study or
// stability check for u_t + alpha u_xxx + beta u_xxxxx + F(u)_x = f.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hdg5/cli.hpp"
#include "hdg5/errors.hpp"

namespace {

struct Flags {
  std::optional<std::string> config, problem, problem_file, levels, dt_policy, tau_preset, tau_file, mode, out;
  std::optional<int> degree, elements;
  std::optional<double> dt, final_time;
  bool solve = false, study = false, allow_unstable = false, dump_config = false;
};

// Flags override values from --config.
hdg5::RunConfig merge(const Flags& f) {
  hdg5::RunConfig c;
  if (f.config) c = hdg5::parse_run_config(hdg5::KeyValueFile::load(*f.config));
  if (f.problem) c.problem = *f.problem;
  if (f.problem_file) c.problem_file = *f.problem_file;
  if (f.degree) c.degree = *f.degree;
  if (f.elements) c.elements = *f.elements;
  if (f.levels) {
    const auto colon = f.levels->find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument("");
      std::size_t used_a = 0, used_b = 0;
      const std::string a = f.levels->substr(0, colon), b = f.levels->substr(colon + 1);
      c.level_min = std::stoi(a, &used_a);
      c.level_max = std::stoi(b, &used_b);
      if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
      throw hdg5::ConfigError("--levels expects A:B, got '" + *f.levels + "'");
    }
  }
  if (f.dt && f.dt_policy) throw hdg5::ConfigError("--dt and --dt-policy are mutually exclusive");
  if (f.dt) c.dt = *f.dt;
  if (f.dt_policy) {
    if (*f.dt_policy != "paper") throw hdg5::ConfigError("--dt-policy accepts only 'paper'");
    c.dt.reset();
  }
  if (f.final_time) c.final_time = *f.final_time;
  if (f.tau_preset) c.tau_preset = hdg5::parse_tau_preset(*f.tau_preset);
  if (f.tau_file) {
    c.tau_file = *f.tau_file;
    if (!f.tau_preset) c.tau_preset = hdg5::TauPreset::Custom;
  }
  if (f.solve && f.study) throw hdg5::ConfigError("--solve and --study are mutually exclusive");
  if (f.mode) c.mode = hdg5::parse_run_mode(*f.mode);
  if (f.solve) c.mode = hdg5::RunMode::Solve;
  if (f.study) c.mode = hdg5::RunMode::Study;
  if (f.out) c.out = *f.out;
  if (f.allow_unstable) c.allow_unstable = true;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HDG solver for fifth-order KdV-type equations"};
  Flags f;
  app.add_option("--config", f.config, "Run configuration file ([run] and optional [tau] sections)");
  app.add_option("--problem", f.problem, "Builtin problem P1, P2, P3 or P4");
  app.add_option("--problem-file", f.problem_file, "Custom problem file with a [problem] section");
  app.add_option("--k", f.degree, "Polynomial degree");
  app.add_option("--N", f.elements, "Number of elements (solve mode)");
  app.add_option("--levels", f.levels, "Study levels A:B, N = 2^n");
  app.add_option("--dt", f.dt, "Fixed time step");
  app.add_option("--dt-policy", f.dt_policy, "'paper': 0.1 h for k <= 1, 0.1 h^2 otherwise");
  app.add_option("--T", f.final_time, "Final time");
  app.add_option("--tau-preset", f.tau_preset, "paper-periodic, paper-dirichlet, zero or custom-file");
  app.add_option("--tau-file", f.tau_file, "Penalty table file (implies custom-file)");
  app.add_option("--mode", f.mode, "solve, study, superconvergence or stability-check");
  app.add_flag("--solve", f.solve, "Same as --mode solve");
  app.add_flag("--study", f.study, "Same as --mode study");
  app.add_option("--out", f.out, "Output file; stdout when omitted");
  app.add_flag("--allow-unstable", f.allow_unstable, "Run even if the penalty table fails the stability check");
  app.add_flag("--dump-config", f.dump_config, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? hdg5::kExitOk : hdg5::kExitConfig;
  }

  hdg5::RunConfig cfg;
  try {
    cfg = merge(f);
  } catch (const hdg5::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return hdg5::kExitConfig;
  }

  if (f.dump_config) {
    hdg5::dump_run_config(std::cout, cfg);
    return hdg5::kExitOk;
  }

  if (cfg.out.empty()) return hdg5::run(cfg, std::cout, std::cerr);
  std::ofstream file(cfg.out);
  if (!file) {
    std::cerr << "config error: cannot write '" << cfg.out << "'\n";
    return hdg5::kExitConfig;
  }
  return hdg5::run(cfg, file, std::cout);
}
