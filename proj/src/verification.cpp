#include "hdg5/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>

#include "hdg5/errors.hpp"
#include "hdg5/quadrature.hpp"

namespace hdg5 {

namespace {

// Enough points that (omega)_k of a smooth function is exact to roundoff on
// the coarsest meshes in use.
constexpr int kProjectionPoints = 24;

double sign_k(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

std::string describe(const StabilizationConfig& c) {
  std::ostringstream os;
  os << "tau_su=(" << c.tau_su_minus << "," << c.tau_su_plus << ") tau_sq=(" << c.tau_sq_minus << ","
     << c.tau_sq_plus << ") tau_ru=(" << c.tau_ru_minus << "," << c.tau_ru_plus << ") tau_rq=(" << c.tau_rq_minus
     << "," << c.tau_rq_plus << ") tau_sp-=" << c.tau_sp_minus << " tau_rp-=" << c.tau_rp_minus
     << " tau_pu+=" << c.tau_pu_plus << " tau_pq+=" << c.tau_pq_plus;
  return os.str();
}

}  // namespace

ProjectionTheta projection_theta(const StabilizationConfig& c) {
  ProjectionTheta t;
  t.s_q = c.tau_sq_minus + c.tau_sq_plus - c.tau_sp_minus * c.tau_pq_plus;
  t.s_u = c.tau_su_minus + c.tau_su_plus - c.tau_sp_minus * c.tau_pu_plus;
  t.r_q = c.tau_rq_minus + c.tau_rq_plus - c.tau_rp_minus * c.tau_pq_plus;
  t.r_u = c.tau_ru_minus + c.tau_ru_plus - c.tau_rp_minus * c.tau_pu_plus;
  return t;
}

SolutionField hdg_project(const ElementwiseQuintuple& omega, const Mesh& mesh, const ReferenceBasis& basis,
                          const StabilizationConfig& c) {
  const ProjectionTheta th = projection_theta(c);
  const double delta = th.delta();
  if (delta == 0.0) throw ProjectionSingularError("HDG projection is singular (Delta = 0) for " + describe(c));

  const int k = basis.degree();
  const int n = k + 1;
  const double sk = sign_k(k);
  const GaussLegendre<double> quad(kProjectionPoints);
  SolutionField out(k, mesh.element_count());

  for (int e = 1; e <= mesh.element_count(); ++e) {
    const double xl = mesh.left(e);
    const double xr = mesh.right(e);
    // g_omega at x_{i-1}^+ and x_i^-.
    std::array<double, 5> gl{}, gr{};
    for (Var v : kAllVars) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      for (int q = 0; q < quad.size(); ++q) {
        const double xi = quad.nodes[q];
        const double f = omega(v, e, to_physical(mesh, e, xi));
        for (int j = 0; j < n; ++j) a[j] += quad.weights[q] * f * legendre<double>(j, xi);
      }
      for (int j = 0; j < n; ++j) a[j] *= (2.0 * j + 1.0) / 2.0;
      out[v].col(e - 1) = a;
      gl[index(v)] = omega(v, e, xl) - evaluate(a, -1.0);
      gr[index(v)] = omega(v, e, xr) - evaluate(a, 1.0);
    }
    const int U = index(Var::u), Q = index(Var::q), P = index(Var::p), R = index(Var::r), S = index(Var::s);
    const double b1 = -(gr[S] - c.tau_su_minus * gr[U] - c.tau_sq_minus * gr[Q] - c.tau_sp_minus * gr[P]);
    const double b2 = -(gr[R] - c.tau_ru_minus * gr[U] - c.tau_rq_minus * gr[Q] - c.tau_rp_minus * gr[P]);
    const double b3 = -(gl[P] + c.tau_pu_plus * gl[U] + c.tau_pq_plus * gl[Q]);
    const double b4 = -(gl[S] + c.tau_su_plus * gl[U] + c.tau_sq_plus * gl[Q]);
    const double b5 = -(gl[R] + c.tau_ru_plus * gl[U] + c.tau_rq_plus * gl[Q]);
    const double bt4 = -b1 + sk * b4 - sk * c.tau_sp_minus * b3;
    const double bt5 = -b2 + sk * b5 - sk * c.tau_rp_minus * b3;

    const double cq = (bt4 * th.r_u - bt5 * th.s_u) / delta;
    const double cu = (bt5 * th.s_q - bt4 * th.r_q) / delta;
    const double cp = sk * b3 - c.tau_pq_plus * cq - c.tau_pu_plus * cu;
    const double cr = b2 + c.tau_rp_minus * cp + c.tau_rq_minus * cq + c.tau_ru_minus * cu;
    const double cs = b1 + c.tau_sp_minus * cp + c.tau_sq_minus * cq + c.tau_su_minus * cu;

    // Pi omega = (omega)_k - d_omega, d_omega = c_omega L_k.
    out[Var::u](k, e - 1) -= cu;
    out[Var::q](k, e - 1) -= cq;
    out[Var::p](k, e - 1) -= cp;
    out[Var::r](k, e - 1) -= cr;
    out[Var::s](k, e - 1) -= cs;
  }
  return out;
}

SolutionField hdg_project(const ExactSolution& exact, double t, const Mesh& mesh, const ReferenceBasis& basis,
                          const StabilizationConfig& cfg) {
  return hdg_project([&](Var v, int, double x) { return exact.fields[index(v)](x, t); }, mesh, basis, cfg);
}

SolutionField hdg_project(const SolutionField& field, const Mesh& mesh, const ReferenceBasis& basis,
                          const StabilizationConfig& cfg) {
  return hdg_project(
      [&](Var v, int e, double x) {
        const double xi = (2.0 * x - mesh.left(e) - mesh.right(e)) / mesh.width(e);
        return evaluate(field[v].col(e - 1), xi);
      },
      mesh, basis, cfg);
}

VarArray error_norms(const SolutionField& field, const ExactSolution& exact, double t, const Mesh& mesh,
                     const ReferenceBasis& basis) {
  VarArray out{};
  for (Var v : kAllVars) {
    const auto& f = exact.fields[index(v)];
    out[index(v)] = l2_error([&f, t](double x) { return f(x, t); }, field[v], mesh, basis);
  }
  return out;
}

std::optional<double> eoc(double coarse, double fine) {
  if (!std::isfinite(coarse) || !std::isfinite(fine)) return std::nullopt;
  if (coarse < kEocFloor || fine < kEocFloor) return std::nullopt;
  return std::log2(coarse / fine);
}

const LevelResult* StudyReport::finest() const {
  for (auto it = levels.rbegin(); it != levels.rend(); ++it)
    if (!it->failed) return &*it;
  return nullptr;
}

namespace {

LevelResult run_level(const ProblemSpec& problem, int degree, int level, const StabilizationConfig& cfg,
                      const StudyOptions& options) {
  LevelResult r;
  r.level = level;
  r.elements = 1 << level;
  try {
    const Mesh mesh = build_mesh(problem.domain_left, problem.domain_right, r.elements, problem.boundary);
    const ReferenceBasis basis = ReferenceBasis::for_problem(degree, !problem.flux.is_zero);
    r.h = mesh.max_width();
    r.dt = options.dt.step(degree, r.h);
    const double T = options.final_time.value_or(problem.final_time);
    MidpointIntegrator integrator(problem, mesh, basis, cfg, options.solver);
    if (options.record_residuals)
      integrator.set_solve_observer([&r](const StationarySolver& s, const StationaryResult& res, const ModalField& load) {
        r.max_local_residual = std::max(r.max_local_residual, s.local_residual(res.field, res.traces, load));
        r.max_transmission_residual = std::max(r.max_transmission_residual, s.transmission_residual(res.field, res.traces));
      });
    const TimeState final_state = integrator.run(T, r.dt);
    r.error = error_norms(final_state.field, *problem.exact, final_state.time, mesh, basis);
    r.newton_iterations = integrator.max_newton_iterations();
  } catch (const std::exception& ex) {
    r.failed = true;
    r.failure = ex.what();
    r.error.fill(std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

}  // namespace

StudyReport run_convergence_study(const ProblemSpec& problem, int degree, int level_min, int level_max,
                                  const StabilizationConfig& cfg, const StudyOptions& options) {
  if (!problem.exact) throw InvalidProblemError("convergence study needs an exact solution");
  if (level_min < 1 || level_max < level_min) throw ConfigError("convergence study needs 1 <= level_min <= level_max");
  StudyReport report;
  report.problem = problem.name;
  report.degree = degree;
  if (options.parallel) {
    std::vector<std::future<LevelResult>> jobs;
    for (int n = level_min; n <= level_max; ++n)
      jobs.push_back(std::async(std::launch::async, run_level, std::cref(problem), degree, n, std::cref(cfg),
                                std::cref(options)));
    for (auto& j : jobs) report.levels.push_back(j.get());
  } else {
    for (int n = level_min; n <= level_max; ++n) report.levels.push_back(run_level(problem, degree, n, cfg, options));
  }
  compute_orders(report);
  return report;
}

void compute_orders(StudyReport& report) {
  const LevelResult* prev = nullptr;
  for (auto& lv : report.levels) {
    lv.order.fill(std::nullopt);
    if (lv.failed) continue;
    if (prev != nullptr && lv.level == prev->level + 1)
      for (int v = 0; v < 5; ++v) lv.order[v] = eoc(prev->error[v], lv.error[v]);
    prev = &lv;
  }
}

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

namespace {

std::string format_order(const std::optional<double>& o) {
  if (!o) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *o);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const StudyReport& report) {
  os << "k,N,h,dt";
  for (const char* name : kVarNames) os << ",e_" << name << ",eoc_" << name;
  os << '\n';
  for (const auto& lv : report.levels) {
    os << report.degree << ',' << lv.elements << ',' << format_sci(lv.h) << ',' << format_sci(lv.dt);
    for (int v = 0; v < 5; ++v) {
      if (lv.failed)
        os << ",failed,";
      else
        os << ',' << format_sci(lv.error[v]) << ',' << format_order(lv.order[v]);
    }
    os << '\n';
  }
}

ProblemSpec stationary_sine_problem() {
  ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  p.name = "stationary-sine";
  p.forcing = [](double x, double) { return std::sin(x) - std::cos(x); };
  p.initial = [](double x) { return std::sin(x); };
  p.initial_operator = [](double x) { return -std::cos(x); };
  ExactSolution ex;
  ex.fields = {[](double x, double) { return std::sin(x); }, [](double x, double) { return std::cos(x); },
               [](double x, double) { return -std::sin(x); }, [](double x, double) { return -std::cos(x); },
               [](double x, double) { return std::sin(x); }};
  ex.u_t = [](double, double) { return 0.0; };
  p.exact = ex;
  return p;
}

SuperconvergenceReport superconvergence_study(int degree, int level_min, int level_max,
                                              const StabilizationConfig& cfg) {
  const ProblemSpec problem = stationary_sine_problem();
  SuperconvergenceReport report;
  report.degree = degree;
  for (int n = level_min; n <= level_max; ++n) {
    SuperconvergenceLevel lv;
    lv.level = n;
    lv.elements = 1 << n;
    const Mesh mesh = build_mesh(problem.domain_left, problem.domain_right, lv.elements, problem.boundary);
    const ReferenceBasis basis = ReferenceBasis::for_problem(degree, false);
    lv.h = mesh.max_width();
    StationarySolver solver(problem, mesh, basis, cfg, 1.0);
    const auto f = [&problem](double x) { return problem.forcing(x, 0.0); };
    const StationaryResult sol = solver.solve(load_from_function(f, mesh, basis));

    const SolutionField proj = hdg_project(*problem.exact, 0.0, mesh, basis, cfg);
    const SolutionField diff = proj - sol.field;
    for (Var v : kAllVars) lv.projected_error[index(v)] = l2_norm(diff[v], mesh);

    lv.trace_error.fill(0.0);
    for (int e = 1; e <= mesh.element_count(); ++e) {
      const double x = mesh.right(e);
      auto op = solver.element_operator(e, sol.field, sol.traces);
      const FaceData fd = op->face_data(element_state(sol.field, e), sol.traces.element_inputs(e));
      const TraceInputs t = sol.traces.element_inputs(e);
      const VarArray hat = {t[trace::kURight], t[trace::kQRight], t[trace::kPRight], fd[FaceQuantity::RMinus],
                            fd[FaceQuantity::SMinus]};
      for (int v = 0; v < 5; ++v)
        lv.trace_error[v] = std::max(lv.trace_error[v], std::abs(hat[v] - problem.exact->fields[v](x, 0.0)));
    }
    if (!report.levels.empty()) {
      const auto& prev = report.levels.back();
      for (int v = 0; v < 5; ++v) {
        lv.projected_order[v] = eoc(prev.projected_error[v], lv.projected_error[v]);
        lv.trace_order[v] = eoc(prev.trace_error[v], lv.trace_error[v]);
      }
    }
    report.levels.push_back(lv);
  }
  return report;
}

void write_csv(std::ostream& os, const SuperconvergenceReport& report) {
  os << "k,N,h";
  for (const char* name : kVarNames) os << ",eps_" << name << ",eoc_eps_" << name;
  for (const char* name : kVarNames) os << ",trace_" << name << ",eoc_trace_" << name;
  os << '\n';
  for (const auto& lv : report.levels) {
    os << report.degree << ',' << lv.elements << ',' << format_sci(lv.h);
    for (int v = 0; v < 5; ++v) os << ',' << format_sci(lv.projected_error[v]) << ',' << format_order(lv.projected_order[v]);
    for (int v = 0; v < 5; ++v) os << ',' << format_sci(lv.trace_error[v]) << ',' << format_order(lv.trace_order[v]);
    os << '\n';
  }
}

}  // namespace hdg5
