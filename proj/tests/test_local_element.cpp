#include <doctest.h>

#include <cmath>
#include <random>

#include "hdg5/errors.hpp"
#include "hdg5/global_hdg.hpp"
#include "hdg5/local_element.hpp"

using namespace hdg5;

namespace {

Eigen::VectorXd random_vector(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

TraceInputs random_traces(std::mt19937& rng) {
  const Eigen::VectorXd v = random_vector(rng, 5);
  return TraceInputs(v);
}

}  // namespace

TEST_CASE("local solve has residual below 1e-10 for every degree") {
  std::mt19937 rng(3);
  const Mesh mesh = build_mesh(0.0, 1.0, 4, BoundaryKind::Periodic);
  for (int k = 0; k <= 5; ++k) {
    const ReferenceBasis basis(k, k + 2);
    for (const auto& cfg : {StabilizationConfig::periodic_preset(), StabilizationConfig::dirichlet_preset()}) {
      const LocalOperator op = build_local_operator(mesh, 2, basis, cfg, 3.0, 1.0, -1.0);
      const TraceInputs t = random_traces(rng);
      const Eigen::VectorXd load = random_vector(rng, op.size());
      const ElementState x = solve_local(op, t, load);
      const Eigen::VectorXd res = op.residual(x, t, load);
      CHECK(res.lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + x.lpNorm<Eigen::Infinity>()));
      CHECK(compatibility_residual(op, x, t).lpNorm<Eigen::Infinity>() < 1e-10 * (1.0 + x.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("local solve is affine in traces and load") {
  std::mt19937 rng(5);
  const Mesh mesh = build_mesh(0.0, 2.0, 8, BoundaryKind::Dirichlet);
  const ReferenceBasis basis(3, 5);
  const LocalOperator op = build_local_operator(mesh, 5, basis, StabilizationConfig::dirichlet_preset(), 2.0, 0.5, -1.0);
  const TraceInputs t1 = random_traces(rng), t2 = random_traces(rng);
  const Eigen::VectorXd l1 = random_vector(rng, op.size()), l2 = random_vector(rng, op.size());
  const double a = 0.7, b = -1.9;
  const ElementState lhs = solve_local(op, a * t1 + b * t2, a * l1 + b * l2);
  const ElementState rhs = a * solve_local(op, t1, l1) + b * solve_local(op, t2, l2);
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-11 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("constant test functions give the element balance laws") {
  // v = 1 in the first and last local equations:
  //   h q_0 = u-hat(x_i) - u-hat(x_{i-1}),
  //   gamma h u_0 + F-hat(x_i^-) - F-hat(x_{i-1}^+) = (f, 1).
  std::mt19937 rng(9);
  const Mesh mesh = build_mesh(0.0, 1.0, 5, BoundaryKind::Periodic);
  for (int k = 0; k <= 3; ++k) {
    const ReferenceBasis basis(k, k + 2);
    const double gamma = 4.0;
    const LocalOperator op = build_local_operator(mesh, 3, basis, StabilizationConfig::periodic_preset(), gamma, 1.0, -1.0);
    const TraceInputs t = random_traces(rng);
    const Eigen::VectorXd load = random_vector(rng, op.size());
    const ElementState x = solve_local(op, t, load);
    const int n = k + 1;
    const double h = mesh.width(3);
    CHECK(h * x[index(Var::q) * n] == doctest::Approx(t(trace::kURight) - t(trace::kULeft)));
    const FaceData f = extract_face_data(op, x, t);
    const double balance = gamma * h * x[index(Var::u) * n] + f[FaceQuantity::FluxRight] - f[FaceQuantity::FluxLeft];
    CHECK(balance == doctest::Approx(load[index(Var::u) * n]));
  }
}

TEST_CASE("derived traces match their closed forms at both faces") {
  std::mt19937 rng(13);
  const Mesh mesh = build_mesh(0.0, 1.0, 4, BoundaryKind::Dirichlet);
  const ReferenceBasis basis(2, 4);
  StabilizationConfig c = StabilizationConfig::dirichlet_preset();
  c.tau_pu_plus = 0.3;
  c.tau_pq_plus = -0.2;
  c.tau_rp_minus = 0.4;
  c.tau_sp_minus = 0.1;
  const double alpha = 0.5, beta = -2.0;
  const LocalOperator op = build_local_operator(mesh, 2, basis, c, 1.0, alpha, beta);
  const ElementState x = random_vector(rng, op.size());
  const TraceInputs t = random_traces(rng);
  const int n = 3;
  auto left = [&](Var v) { return evaluate(x.segment(index(v) * n, n), -1.0); };
  auto right = [&](Var v) { return evaluate(x.segment(index(v) * n, n), 1.0); };
  const FaceData f = extract_face_data(op, x, t);
  // n = -1 at x_{i-1}^+ and n = +1 at x_i^-.
  const double du_l = t(trace::kULeft) - left(Var::u), dq_l = t(trace::kQLeft) - left(Var::q);
  const double du_r = t(trace::kURight) - right(Var::u), dq_r = t(trace::kQRight) - right(Var::q);
  const double dp_r = t(trace::kPRight) - right(Var::p);
  const double p_plus = left(Var::p) - c.tau_pu_plus * du_l - c.tau_pq_plus * dq_l;
  const double r_plus = left(Var::r) - c.tau_ru_plus * du_l - c.tau_rq_plus * dq_l;
  const double s_plus = left(Var::s) - c.tau_su_plus * du_l - c.tau_sq_plus * dq_l;
  const double r_minus = right(Var::r) + c.tau_ru_minus * du_r + c.tau_rq_minus * dq_r + c.tau_rp_minus * dp_r;
  const double s_minus = right(Var::s) + c.tau_su_minus * du_r + c.tau_sq_minus * dq_r + c.tau_sp_minus * dp_r;
  CHECK(f[FaceQuantity::PPlus] == doctest::Approx(p_plus));
  CHECK(f[FaceQuantity::RPlus] == doctest::Approx(r_plus));
  CHECK(f[FaceQuantity::SPlus] == doctest::Approx(s_plus));
  CHECK(f[FaceQuantity::PMinus] == doctest::Approx(t(trace::kPRight)));
  CHECK(f[FaceQuantity::RMinus] == doctest::Approx(r_minus));
  CHECK(f[FaceQuantity::SMinus] == doctest::Approx(s_minus));
  CHECK(f[FaceQuantity::FluxLeft] == doctest::Approx(alpha * p_plus + beta * s_plus));
  CHECK(f[FaceQuantity::FluxRight] == doctest::Approx(alpha * t(trace::kPRight) + beta * s_minus));
}

TEST_CASE("uniform linear meshes share one element factorization") {
  const ProblemSpec p = builtin_problem(BuiltinProblem::P1);
  const Mesh mesh = build_mesh(p.domain_left, p.domain_right, 8, p.boundary);
  const ReferenceBasis basis(2, 4);
  const StationarySolver cached(p, mesh, basis, StabilizationConfig::periodic_preset(), 1.0);
  const SolutionField zero(2, 8);
  const TraceVector tz = TraceVector::zeros(mesh);
  CHECK(cached.element_operator(1, zero, tz).get() == cached.element_operator(8, zero, tz).get());
  StationaryOptions no_cache;
  no_cache.cache_uniform = false;
  const StationarySolver fresh(p, mesh, basis, StabilizationConfig::periodic_preset(), 1.0, no_cache);
  CHECK(fresh.element_operator(1, zero, tz).get() != fresh.element_operator(8, zero, tz).get());
  CHECK((fresh.element_operator(3, zero, tz)->interior() - cached.element_operator(3, zero, tz)->interior()).norm() == 0.0);
}

TEST_CASE("singular local system names the element") {
  // gamma = 0 with zero tau: constants in u are invisible to the local equations.
  const Mesh mesh = build_mesh(0.0, 1.0, 4, BoundaryKind::Periodic);
  const ReferenceBasis basis(1, 3);
  try {
    build_local_operator(mesh, 3, basis, StabilizationConfig::zero_preset(), 0.0, 0.0, -1.0);
    FAIL("expected CondensationError");
  } catch (const CondensationError& e) {
    CHECK(e.element == 3);
  }
}
