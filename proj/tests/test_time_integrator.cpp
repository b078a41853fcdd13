#include <doctest.h>

#include <cmath>

#include "hdg5/time_integrator.hpp"
#include "hdg5/verification.hpp"

using namespace hdg5;

namespace {

// P1 data with f = 0; the exact solution no longer applies.
ProblemSpec unforced_p1() {
  ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  p.forcing = [](double, double) { return 0.0; };
  p.exact.reset();
  return p;
}

double field_distance(const SolutionField& a, const SolutionField& b, const Mesh& mesh) {
  double s = 0.0;
  for (Var v : kAllVars) s = std::max(s, l2_norm(a[v] - b[v], mesh));
  return s;
}

}  // namespace

TEST_CASE("uniform time grid with a shortened final step") {
  const TimeGrid g = TimeGrid::uniform(0.1, 0.03);
  REQUIRE(g.steps() == 4);
  CHECK(g.times.back() == 0.1);
  CHECK(g.step_size(3) == doctest::Approx(0.01));
  const TimeGrid exact = TimeGrid::uniform(0.1, 0.025);
  CHECK(exact.steps() == 4);
  for (int j = 0; j < exact.steps(); ++j) CHECK(exact.step_size(j) > 0.0);
  CHECK(TimeGrid::uniform(0.1, 0.1 / 3.0).steps() == 3);
}

TEST_CASE("step-size policy: 0.1 h for k <= 1, 0.1 h^2 for k >= 2") {
  CHECK(paper_time_step(0, 0.5) == doctest::Approx(0.05));
  CHECK(paper_time_step(1, 0.5) == doctest::Approx(0.05));
  CHECK(paper_time_step(2, 0.5) == doctest::Approx(0.025));
  CHECK(paper_time_step(3, 0.5) == doctest::Approx(0.025));
}

TEST_CASE("zero data gives the zero state") {
  ProblemSpec p = unforced_p1();
  p.initial = [](double) { return 0.0; };
  p.initial_operator = [](double) { return 0.0; };
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 8, p.boundary);
  const ReferenceBasis basis(2, 4);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  const TimeState s = integrator.step(integrator.initialize(), 0.01);
  for (Var v : kAllVars) CHECK(s.field[v].lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(s.traces.max_abs() == 0.0);
}

TEST_CASE("initial approximation converges at order k+1") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  for (int k = 1; k <= 3; ++k) {
    double prev = 0.0;
    for (int n = 4; n <= 6; ++n) {
      const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 1 << n, p.boundary);
      const ReferenceBasis basis(k, k + 2);
      MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
      const TimeState s = integrator.initialize();
      const double e = error_norms(s.field, *p.exact, 0.0, mesh, basis)[0];
      if (n > 4) CHECK(std::log2(prev / e) == doctest::Approx(k + 1).epsilon(0.1 / (k + 1)));
      prev = e;
    }
  }
}

TEST_CASE("midpoint rule is time-reversible on the linear problem") {
  const ProblemSpec p = unforced_p1();
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 16, p.boundary);
  const ReferenceBasis basis(2, 4);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  const TimeState s0 = integrator.initialize();
  const double dt = 0.1 * mesh.max_width();
  const TimeState s1 = integrator.step(s0, dt);
  const TimeState back = integrator.step_backward(s1, dt);
  CHECK(field_distance(s1.field, s0.field, mesh) > 1e-4);
  CHECK(field_distance(back.field, s0.field, mesh) < 1e-8);
  CHECK((back.traces - s0.traces).max_abs() < 1e-8);
  CHECK(back.time == doctest::Approx(s0.time).scale(1.0));
}

TEST_CASE("L2 norm is non-increasing without forcing") {
  const ProblemSpec p = unforced_p1();
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 16, p.boundary);
  const ReferenceBasis basis(1, 3);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  TimeState s = integrator.initialize();
  double norm = l2_norm(s.field[Var::u], mesh);
  for (int j = 0; j < 40; ++j) {
    s = integrator.step(s, 0.1 * mesh.max_width());
    const double next = l2_norm(s.field[Var::u], mesh);
    CHECK(next <= norm * (1.0 + 1e-10));
    norm = next;
  }
}

TEST_CASE("stored companion fields stay compatible with u and the traces") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P2);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 16, p.boundary);
  const ReferenceBasis basis = ReferenceBasis::for_problem(2, true);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  TimeState s = integrator.initialize();
  for (int j = 0; j < 5; ++j) s = integrator.step(s, 0.01);
  const StationarySolver probe(p, mesh, basis, StabilizationConfig::periodic_preset(), 1.0);
  for (int e = 1; e <= mesh.element_count(); ++e) {
    const auto op = probe.element_operator(e, s.field, s.traces, true);
    const ElementState x = element_state(s.field, e);
    CHECK(compatibility_residual(*op, x, s.traces.element_inputs(e)).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("one-step error shrinks by about 8 when dt is halved") {
  // Spatial error at k = 5, N = 16 is far below the temporal local error.
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 16, p.boundary);
  const ReferenceBasis basis(5, 7);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  const TimeState s0 = integrator.initialize();
  auto one_step_error = [&](double dt) {
    const TimeState s = integrator.step(s0, dt);
    return error_norms(s.field, *p.exact, dt, mesh, basis)[0];
  };
  const double e1 = one_step_error(0.08), e2 = one_step_error(0.04);
  CHECK(e1 / e2 == doctest::Approx(8.0).epsilon(0.15));
}

TEST_CASE("run visits every level and ends at the final time") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 8, p.boundary);
  const ReferenceBasis basis(1, 3);
  MidpointIntegrator integrator(p, mesh, basis, StabilizationConfig::periodic_preset());
  int seen = 0;
  double last = -1.0;
  const TimeState s = integrator.run(0.1, 0.03, [&](const TimeState& st) {
    CHECK(st.level == seen);
    CHECK(st.time > last);
    last = st.time;
    ++seen;
  });
  CHECK(seen == 5);
  CHECK(s.time == 0.1);
}
