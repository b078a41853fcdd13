#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hdg5/mesh.hpp"

namespace hdg5 {

using SpaceTimeFunction = std::function<double(double x, double t)>;
using TimeFunction = std::function<double(double t)>;

/// Scalar flux F(u) with its derivative. The zero flux is flagged so the
/// solver can take the linear path.
struct Flux {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  bool is_zero = true;

  static Flux zero();
  /// F(u) = sum_i coeffs[i] * u^i.
  static Flux polynomial(std::vector<double> coeffs);
};

/// Exact solution u together with q = u_x, p = q_x, r = p_x, s = r_x and u_t.
struct ExactSolution {
  std::array<SpaceTimeFunction, 5> fields;  // indexed by Var
  SpaceTimeFunction u_t;
};

/// Boundary values for the five traces fixed in the Dirichlet case:
/// u-hat and q-hat at both ends, p-hat^- at the right end.
struct DirichletData {
  TimeFunction u_left, u_right, q_left, q_right, p_right;
};

/// u_t + alpha u_xxx + beta u_xxxxx + (F(u))_x = f on (a, b).
struct ProblemSpec {
  std::string name;
  double alpha = 0.0;
  double beta = -1.0;
  double domain_left = 0.0;
  double domain_right = 1.0;
  BoundaryKind boundary = BoundaryKind::Periodic;
  Flux flux = Flux::zero();
  SpaceTimeFunction forcing;
  std::function<double(double)> initial;
  /// D(u_0) = alpha u_0''' + beta u_0''''' + F(u_0)', used to build the
  /// stationary problem for the initial approximation.
  std::function<double(double)> initial_operator;
  std::optional<ExactSolution> exact;
  std::optional<DirichletData> dirichlet;
  double final_time = 0.1;

  double length() const { return domain_right - domain_left; }
  /// Throws InvalidProblemError when beta >= 0 or required members are missing.
  void validate() const;
};

enum class BuiltinProblem { P1, P2, P3, P4 };

ProblemSpec builtin_problem(BuiltinProblem id);
BuiltinProblem parse_builtin_problem(const std::string& name);
std::string to_string(BuiltinProblem id);

/// Dirichlet data sampled from an exact solution.
DirichletData dirichlet_from_exact(const ExactSolution& exact, double left, double right);

}  // namespace hdg5
