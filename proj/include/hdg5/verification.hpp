#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdg5/global_hdg.hpp"
#include "hdg5/time_integrator.hpp"

namespace hdg5 {

/// Value of variable v on element e (1-based) at x. Lets the projection act on
/// piecewise (discontinuous) input as well as on smooth functions.
using ElementwiseQuintuple = std::function<double(Var v, int element, double x)>;

/// theta^alpha_omega = tau_{alpha omega}^- + tau_{alpha omega}^+ - tau_{alpha p}^- tau_{p omega}^+
/// for alpha in {s, r}, omega in {q, u}, and Delta = theta^s_q theta^r_u - theta^s_u theta^r_q.
struct ProjectionTheta {
  double s_q = 0.0;
  double s_u = 0.0;
  double r_q = 0.0;
  double r_u = 0.0;
  double delta() const { return s_q * r_u - s_u * r_q; }
};

ProjectionTheta projection_theta(const StabilizationConfig& cfg);

/// HDG projection Pi: omega_k minus a multiple of L_k per variable, fixed by the
/// five face conditions tied to the trace definitions. Throws
/// ProjectionSingularError when Delta = 0.
SolutionField hdg_project(const ElementwiseQuintuple& omega, const Mesh& mesh, const ReferenceBasis& basis,
                          const StabilizationConfig& cfg);
SolutionField hdg_project(const ExactSolution& exact, double t, const Mesh& mesh, const ReferenceBasis& basis,
                          const StabilizationConfig& cfg);
/// Piecewise-polynomial input; face values come from each element's own polynomial.
SolutionField hdg_project(const SolutionField& field, const Mesh& mesh, const ReferenceBasis& basis,
                          const StabilizationConfig& cfg);

using VarArray = std::array<double, 5>;

/// L2 error per variable, overintegrated with n_q + 3 points.
VarArray error_norms(const SolutionField& field, const ExactSolution& exact, double t, const Mesh& mesh,
                     const ReferenceBasis& basis);

/// Errors below this are roundoff and do not get an EOC.
inline constexpr double kEocFloor = 1e-12;

/// log2(coarse / fine) for h-halving; empty if either error is at the floor or not finite.
std::optional<double> eoc(double coarse, double fine);

struct LevelResult {
  int level = 0;
  int elements = 0;
  double h = 0.0;
  double dt = 0.0;
  VarArray error{};
  std::array<std::optional<double>, 5> order{};
  int newton_iterations = 0;
  /// Largest residuals over every stationary solve; filled when
  /// StudyOptions::record_residuals is set.
  double max_local_residual = 0.0;
  double max_transmission_residual = 0.0;
  bool failed = false;
  std::string failure;
};

struct StudyReport {
  std::string problem;
  int degree = 0;
  std::vector<LevelResult> levels;

  /// Last level that did not fail, or nullptr.
  const LevelResult* finest() const;
};

struct TimeStepPolicy {
  /// Unset: 0.1 h for k <= 1, 0.1 h^2 for k >= 2. Otherwise a fixed step.
  std::optional<double> fixed;
  double step(int degree, double h) const { return fixed ? *fixed : paper_time_step(degree, h); }
};

struct StudyOptions {
  TimeStepPolicy dt;
  std::optional<double> final_time;  ///< defaults to the problem's
  StationaryOptions solver;
  bool parallel = true;
  bool record_residuals = false;
};

/// Time-dependent study over N = 2^n, n = level_min..level_max. A level whose
/// solve throws is marked failed; the study continues.
StudyReport run_convergence_study(const ProblemSpec& problem, int degree, int level_min, int level_max,
                                  const StabilizationConfig& cfg, const StudyOptions& options = {});

/// Fills LevelResult::order from consecutive non-failed levels.
void compute_orders(StudyReport& report);

/// Columns k,N,h,dt,e_u,eoc_u,...,e_s,eoc_s; 4 significant digits; blank EOC
/// where undefined, "failed" in every error column of a failed level.
void write_csv(std::ostream& os, const StudyReport& report);
std::string format_sci(double v);

struct SuperconvergenceLevel {
  int level = 0;
  int elements = 0;
  double h = 0.0;
  VarArray projected_error{};  ///< ||Pi omega - omega_h||
  VarArray trace_error{};      ///< max over nodes of |omega-hat - omega|
  std::array<std::optional<double>, 5> projected_order{};
  std::array<std::optional<double>, 5> trace_order{};
};

struct SuperconvergenceReport {
  int degree = 0;
  std::vector<SuperconvergenceLevel> levels;
};

/// Stationary gamma = 1 problem on [0, 2 pi], periodic, alpha = 0, beta = -1,
/// F = 0 with exact solution sin x.
ProblemSpec stationary_sine_problem();

/// Solves the stationary problem with the given tau on N = 2^n elements and
/// measures ||Pi omega - omega_h|| and the node trace errors. Trace errors use
/// u-hat, q-hat, p-hat^- and r-hat^-, s-hat^- from the element left of each node.
SuperconvergenceReport superconvergence_study(int degree, int level_min, int level_max,
                                              const StabilizationConfig& cfg);

void write_csv(std::ostream& os, const SuperconvergenceReport& report);

}  // namespace hdg5
