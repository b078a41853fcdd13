#include "hdg5/cli.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "hdg5/errors.hpp"
#include "hdg5/time_integrator.hpp"
#include "hdg5/verification.hpp"

namespace hdg5 {

ProblemSpec resolve_problem(const RunConfig& cfg) {
  if (!cfg.problem_file.empty()) return load_custom_problem(KeyValueFile::load(cfg.problem_file));
  try {
    return builtin_problem(parse_builtin_problem(cfg.problem));
  } catch (const InvalidProblemError& e) {
    throw ConfigError(e.what());
  }
}

StabilizationConfig resolve_tau(const RunConfig& cfg, const ProblemSpec& problem) {
  const TauPreset preset = cfg.tau_preset.value_or(
      cfg.tau_values ? TauPreset::Custom
                     : (problem.boundary == BoundaryKind::Dirichlet ? TauPreset::PaperDirichlet
                                                                    : TauPreset::PaperPeriodic));
  switch (preset) {
    case TauPreset::PaperPeriodic: return StabilizationConfig::periodic_preset();
    case TauPreset::PaperDirichlet: return StabilizationConfig::dirichlet_preset();
    case TauPreset::Zero: return StabilizationConfig::zero_preset();
    case TauPreset::Custom: break;
  }
  if (!cfg.tau_file.empty()) {
    const KeyValueFile file = KeyValueFile::load(cfg.tau_file);
    bool sectioned = false;
    for (const auto& [key, entry] : file.entries())
      if (key.rfind("tau.", 0) == 0) sectioned = true;
    return parse_tau_table(file, sectioned ? "tau" : "");
  }
  if (cfg.tau_values) return *cfg.tau_values;
  throw ConfigError("tau preset custom-file needs a tau file or a [tau] section");
}

namespace {

void print_report(std::ostream& os, const StabilityReport& report) {
  if (report.pass) {
    os << "stability: pass\n";
    return;
  }
  os << "stability: fail\n";
  for (const auto& v : report.violated) os << "  violated: " << v << '\n';
}

void write_field(std::ostream& os, const TimeState& state, const Mesh& mesh, const ReferenceBasis& basis) {
  os << "element,x,u,q,p,r,s\n";
  const auto& quad = basis.quadrature();
  char buf[64];
  for (int e = 1; e <= mesh.element_count(); ++e) {
    for (int iq = 0; iq < quad.nodes.size(); ++iq) {
      const double xi = quad.nodes[iq];
      std::snprintf(buf, sizeof buf, "%.16e", to_physical(mesh, e, xi));
      os << e << ',' << buf;
      for (Var v : kAllVars) {
        std::snprintf(buf, sizeof buf, "%.16e", evaluate(state.field[v].col(e - 1), xi));
        os << ',' << buf;
      }
      os << '\n';
    }
  }
}

int solve(const RunConfig& cfg, const ProblemSpec& problem, const StabilizationConfig& tau, std::ostream& out,
          std::ostream& log) {
  const Mesh mesh = build_mesh(problem.domain_left, problem.domain_right, cfg.elements, problem.boundary);
  const ReferenceBasis basis = ReferenceBasis::for_problem(cfg.degree, !problem.flux.is_zero);
  const double T = cfg.final_time.value_or(problem.final_time);
  const double dt = cfg.dt.value_or(paper_time_step(cfg.degree, mesh.max_width()));
  MidpointIntegrator integrator(problem, mesh, basis, tau);
  const TimeState final = integrator.run(T, dt);
  write_field(out, final, mesh, basis);
  log << problem.name << " k=" << cfg.degree << " N=" << cfg.elements << " dt=" << format_sci(dt)
      << " T=" << final.time << " steps=" << final.level
      << " max_newton=" << integrator.max_newton_iterations() << '\n';
  if (problem.exact) {
    const VarArray err = error_norms(final.field, *problem.exact, final.time, mesh, basis);
    log << "L2 errors:";
    for (Var v : kAllVars) log << " e_" << kVarNames[index(v)] << '=' << format_sci(err[index(v)]);
    log << '\n';
  }
  return kExitOk;
}

int study(const RunConfig& cfg, const ProblemSpec& problem, const StabilizationConfig& tau, std::ostream& out) {
  StudyOptions opts;
  opts.dt.fixed = cfg.dt;
  opts.final_time = cfg.final_time;
  const StudyReport report = run_convergence_study(problem, cfg.degree, cfg.level_min, cfg.level_max, tau, opts);
  write_csv(out, report);
  for (const auto& level : report.levels)
    if (level.failed) return kExitSolver;
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  cfg.validate();
  if (cfg.mode == RunMode::Superconvergence) {
    // Fixed stationary problem; only k, levels and tau apply.
    const ProblemSpec problem = stationary_sine_problem();
    const StabilizationConfig tau = resolve_tau(cfg, problem);
    const StabilityReport report = check_stability(tau, problem.alpha, problem.beta, false);
    if (!report.pass && !cfg.allow_unstable) {
      log << "refusing to run: ";
      print_report(log, report);
      return kExitUnstable;
    }
    write_csv(out, superconvergence_study(cfg.degree, cfg.level_min, cfg.level_max, tau));
    return kExitOk;
  }

  const ProblemSpec problem = resolve_problem(cfg);
  const StabilizationConfig tau = resolve_tau(cfg, problem);
  const StabilityReport report = check_stability(tau, problem.alpha, problem.beta, !problem.flux.is_zero);
  if (cfg.mode == RunMode::StabilityCheck) {
    print_report(out, report);
    return report.pass ? kExitOk : kExitUnstable;
  }
  if (!report.pass && !cfg.allow_unstable) {
    log << "refusing to run: ";
    print_report(log, report);
    log << "pass --allow-unstable to run anyway\n";
    return kExitUnstable;
  }
  if (cfg.mode == RunMode::Study) return study(cfg, problem, tau, out);
  return solve(cfg, problem, tau, out, log);
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    return dispatch(cfg, out, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidProblemError& e) {
    log << "invalid problem: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ProjectionSingularError& e) {
    log << "projection undefined: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace hdg5
