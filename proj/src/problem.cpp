#include "hdg5/problem.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "hdg5/basis.hpp"
#include "hdg5/errors.hpp"

namespace hdg5 {

Flux Flux::zero() {
  Flux f;
  f.value = [](double) { return 0.0; };
  f.derivative = [](double) { return 0.0; };
  f.is_zero = true;
  return f;
}

Flux Flux::polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) return zero();
  Flux f;
  f.is_zero = false;
  f.value = [c = coeffs](double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  };
  f.derivative = [c = coeffs](double u) {
    double acc = 0.0;
    for (std::size_t i = c.size() - 1; i >= 1; --i) acc = acc * u + static_cast<double>(i) * c[i];
    return acc;
  };
  return f;
}

void ProblemSpec::validate() const {
  if (!(beta < 0.0)) throw InvalidProblemError("beta must be negative, got " + std::to_string(beta));
  if (!(domain_right > domain_left)) throw InvalidProblemError("empty domain");
  if (!forcing) throw InvalidProblemError("problem '" + name + "' has no forcing");
  if (!initial) throw InvalidProblemError("problem '" + name + "' has no initial data");
  if (!initial_operator) throw InvalidProblemError("problem '" + name + "' has no initial operator");
  if (boundary == BoundaryKind::Dirichlet && !dirichlet)
    throw InvalidProblemError("problem '" + name + "' is Dirichlet but has no boundary data");
}

DirichletData dirichlet_from_exact(const ExactSolution& exact, double left, double right) {
  const auto& u = exact.fields[index(Var::u)];
  const auto& q = exact.fields[index(Var::q)];
  const auto& p = exact.fields[index(Var::p)];
  return DirichletData{
      [u, left](double t) { return u(left, t); },
      [u, right](double t) { return u(right, t); },
      [q, left](double t) { return q(left, t); },
      [q, right](double t) { return q(right, t); },
      [p, right](double t) { return p(right, t); },
  };
}

namespace {

// u = sin(x + t): derivatives cycle through cos, -sin, -cos, sin.
ExactSolution travelling_sine() {
  ExactSolution ex;
  ex.fields = {
      [](double x, double t) { return std::sin(x + t); },
      [](double x, double t) { return std::cos(x + t); },
      [](double x, double t) { return -std::sin(x + t); },
      [](double x, double t) { return -std::cos(x + t); },
      [](double x, double t) { return std::sin(x + t); },
  };
  ex.u_t = [](double x, double t) { return std::cos(x + t); };
  return ex;
}

// u = t sin(x).
ExactSolution growing_sine() {
  ExactSolution ex;
  ex.fields = {
      [](double x, double t) { return t * std::sin(x); },
      [](double x, double t) { return t * std::cos(x); },
      [](double x, double t) { return -t * std::sin(x); },
      [](double x, double t) { return -t * std::cos(x); },
      [](double x, double t) { return t * std::sin(x); },
  };
  ex.u_t = [](double x, double) { return std::sin(x); };
  return ex;
}

}  // namespace

ProblemSpec builtin_problem(BuiltinProblem id) {
  ProblemSpec p;
  p.name = to_string(id);
  p.final_time = 0.1;
  const double pi = std::numbers::pi;
  switch (id) {
    case BuiltinProblem::P1:
      p.alpha = 0.0;
      p.beta = -1.0;
      p.domain_right = 2.0 * pi;
      p.boundary = BoundaryKind::Periodic;
      p.flux = Flux::zero();
      p.exact = travelling_sine();
      // u_t - u_xxxxx = cos(x+t) - cos(x+t)
      p.forcing = [](double, double) { return 0.0; };
      p.initial = [](double x) { return std::sin(x); };
      p.initial_operator = [](double x) { return -std::cos(x); };
      break;
    case BuiltinProblem::P2:
      p.alpha = 1.0;
      p.beta = -1.0;
      p.domain_right = 2.0 * pi;
      p.boundary = BoundaryKind::Periodic;
      p.flux = Flux::polynomial({0.0, 1.0, 1.0, 1.0});
      p.exact = travelling_sine();
      // cos - cos - cos + (1 + 2u + 3u^2) cos = (2u + 3u^2) cos
      p.forcing = [](double x, double t) {
        const double u = std::sin(x + t);
        return (2.0 * u + 3.0 * u * u) * std::cos(x + t);
      };
      p.initial = [](double x) { return std::sin(x); };
      // -cos - cos + (1 + 2u + 3u^2) cos
      p.initial_operator = [](double x) {
        const double u = std::sin(x);
        return (-1.0 + 2.0 * u + 3.0 * u * u) * std::cos(x);
      };
      break;
    case BuiltinProblem::P3:
      p.alpha = 0.0;
      p.beta = -1.0;
      p.domain_right = pi;
      p.boundary = BoundaryKind::Dirichlet;
      p.flux = Flux::zero();
      p.exact = growing_sine();
      // sin x - t cos x
      p.forcing = [](double x, double t) { return std::sin(x) - t * std::cos(x); };
      p.initial = [](double) { return 0.0; };
      p.initial_operator = [](double) { return 0.0; };
      break;
    case BuiltinProblem::P4:
      p.alpha = 1.0;
      p.beta = -1.0;
      p.domain_right = pi;
      p.boundary = BoundaryKind::Dirichlet;
      p.flux = Flux::polynomial({0.0, 1.0, 1.0, 1.0});
      p.exact = growing_sine();
      // sin x - t cos x - t cos x + (1 + 2u + 3u^2) t cos x
      p.forcing = [](double x, double t) {
        const double u = t * std::sin(x);
        return std::sin(x) + (-1.0 + 2.0 * u + 3.0 * u * u) * t * std::cos(x);
      };
      p.initial = [](double) { return 0.0; };
      p.initial_operator = [](double) { return 0.0; };
      break;
  }
  if (p.boundary == BoundaryKind::Dirichlet) p.dirichlet = dirichlet_from_exact(*p.exact, p.domain_left, p.domain_right);
  return p;
}

BuiltinProblem parse_builtin_problem(const std::string& name) {
  if (name == "P1" || name == "p1") return BuiltinProblem::P1;
  if (name == "P2" || name == "p2") return BuiltinProblem::P2;
  if (name == "P3" || name == "p3") return BuiltinProblem::P3;
  if (name == "P4" || name == "p4") return BuiltinProblem::P4;
  throw InvalidProblemError("unknown problem '" + name + "' (expected P1..P4)");
}

std::string to_string(BuiltinProblem id) {
  switch (id) {
    case BuiltinProblem::P1: return "P1";
    case BuiltinProblem::P2: return "P2";
    case BuiltinProblem::P3: return "P3";
    case BuiltinProblem::P4: return "P4";
  }
  return "?";
}

}  // namespace hdg5
