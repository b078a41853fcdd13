#include <doctest.h>

#include <cmath>
#include <set>
#include <utility>

#include "hdg5/errors.hpp"
#include "hdg5/global_hdg.hpp"
#include "hdg5/time_integrator.hpp"

using namespace hdg5;

namespace {

using Pattern = std::set<std::pair<int, int>>;

Pattern pattern_of(const GlobalSystem& g) {
  Pattern p;
  for (int i = 0; i < g.matrix.outerSize(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g.matrix, i); it; ++it)
      p.emplace(i, static_cast<int>(it.col()));
  return p;
}

GlobalSystem linear_system(const ProblemSpec& p, const Mesh& mesh, int k, const StabilizationConfig& cfg) {
  const ReferenceBasis basis(k, k + 2);
  const StationarySolver solver(p, mesh, basis, cfg, 1.0);
  const ModalField load = ModalField::Zero(k + 1, mesh.element_count());
  return solver.assemble(SolutionField(k, mesh.element_count()), TraceVector::zeros(mesh), load);
}

}  // namespace

TEST_CASE("periodic global system has dimension 3N and a k-independent pattern") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  const int N = 16;
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, N, p.boundary);
  const GlobalSystem g0 = linear_system(p, mesh, 0, StabilizationConfig::periodic_preset());
  CHECK(g0.dimension() == 3 * N);
  CHECK(g0.matrix.rows() == 3 * N);
  CHECK(g0.matrix.cols() == 3 * N);
  const Pattern ref = pattern_of(g0);
  const auto band = g0.bandwidth();
  for (int k = 1; k <= 3; ++k) {
    const GlobalSystem g = linear_system(p, mesh, k, StabilizationConfig::periodic_preset());
    CHECK(g.dimension() == 3 * N);
    CHECK(pattern_of(g) == ref);
    CHECK(g.bandwidth() == band);
  }
  // Each node couples only to its two neighbouring elements.
  CHECK(band.first <= 5);
  CHECK(band.second <= 5);
}

TEST_CASE("Dirichlet pattern is k-independent too") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P3);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 12, p.boundary);
  const Pattern ref = pattern_of(linear_system(p, mesh, 0, StabilizationConfig::dirichlet_preset()));
  for (int k = 1; k <= 3; ++k)
    CHECK(pattern_of(linear_system(p, mesh, k, StabilizationConfig::dirichlet_preset())) == ref);
}

TEST_CASE("stationary solves satisfy local and transmission equations") {
  struct Case {
    BuiltinProblem id;
    StabilizationConfig cfg;
  };
  for (const Case& c : {Case{BuiltinProblem::P1, StabilizationConfig::periodic_preset()},
                        Case{BuiltinProblem::P2, StabilizationConfig::periodic_preset()},
                        Case{BuiltinProblem::P3, StabilizationConfig::dirichlet_preset()},
                        Case{BuiltinProblem::P4, StabilizationConfig::dirichlet_preset()}}) {
    const ProblemSpec p = builtin_problem(c.id);
    const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 16, p.boundary);
    for (int k = 0; k <= 3; ++k) {
      const ReferenceBasis basis = ReferenceBasis::for_problem(k, !p.flux.is_zero);
      const double gamma = 20.0;
      const StationarySolver solver(p, mesh, basis, c.cfg, gamma);
      auto f = [&](double x) { return p.forcing(x, 0.05) + gamma * p.initial(x); };
      const ModalField load = load_from_function(f, mesh, basis);
      const BoundaryValues bc = p.dirichlet ? boundary_values_at(*p.dirichlet, 0.05) : BoundaryValues{};
      const StationaryResult r = solver.solve(load, bc);
      CAPTURE(to_string(c.id));
      CAPTURE(k);
      CHECK(solver.local_residual(r.field, r.traces, load) < 1e-10);
      CHECK(solver.transmission_residual(r.field, r.traces) < 1e-9);
    }
  }
}

TEST_CASE("Newton converges within 8 iterations for P2 at h = 2^-5 and dt = 0.1 h^2") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P2);
  const int N = 32;
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, N, p.boundary);
  const ReferenceBasis basis = ReferenceBasis::for_problem(2, true);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  const double dt = paper_time_step(2, mesh.max_width());
  TimeState s = integrator.initialize();
  for (int j = 0; j < 10; ++j) s = integrator.step(s, dt);
  CHECK(integrator.max_newton_iterations() >= 1);
  CHECK(integrator.max_newton_iterations() <= 8);
}

TEST_CASE("global solve inverts the assembled system") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 10, p.boundary);
  GlobalSystem g = linear_system(p, mesh, 2, StabilizationConfig::periodic_preset());
  Eigen::VectorXd x(g.dimension());
  for (int i = 0; i < x.size(); ++i) x[i] = std::sin(0.7 * i + 0.1);
  g.rhs = g.matrix * x;
  CHECK((solve_global(g) - x).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("negative gamma is refused unless explicitly allowed") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 8, p.boundary);
  const ReferenceBasis basis(1, 3);
  CHECK_THROWS_AS(StationarySolver(p, mesh, basis, StabilizationConfig::periodic_preset(), -1.0), InvalidProblemError);
  StationaryOptions o;
  o.allow_negative_gamma = true;
  CHECK_NOTHROW(StationarySolver(p, mesh, basis, StabilizationConfig::periodic_preset(), -1.0, o));
}
