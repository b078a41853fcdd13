#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "hdg5/cli.hpp"
#include "hdg5/config.hpp"
#include "hdg5/errors.hpp"
#include "hdg5/expression.hpp"

using namespace hdg5;

namespace {

KeyValueFile from_text(const std::string& text) {
  std::istringstream in(text);
  return KeyValueFile::parse(in, "test.cfg");
}

std::string temp_file(const std::string& name, const std::string& text) {
  const std::string path = "hdg5_test_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("expressions evaluate like the written formula") {
  const Expression e = Expression::parse("2*sin(x + t) - 0.5*t^2*cos(3*x) + x^3 - 1");
  for (double x : {-1.0, 0.3, 2.0})
    for (double t : {0.0, 0.7}) {
      const double ref = 2 * std::sin(x + t) - 0.5 * t * t * std::cos(3 * x) + x * x * x - 1;
      CHECK(e(x, t) == doctest::Approx(ref));
    }
  CHECK(Expression::parse("pi")(0.0) == doctest::Approx(std::numbers::pi));
  CHECK(Expression::parse("-cos(2*pi*x - pi)")(0.25) == doctest::Approx(-std::cos(-std::numbers::pi / 2)));
  CHECK(Expression::parse("x*t*sin(-t)")(2.0, 0.5) == doctest::Approx(2.0 * 0.5 * std::sin(-0.5)));
}

TEST_CASE("expression derivatives agree with finite differences") {
  const Expression e = Expression::parse("3*t*sin(2*x - t + 0.5) + x^4*cos(x) - 7*x^2");
  auto fd_x = [](const Expression& f, double x, double t) {
    const double h = 1e-3;
    return (-f(x + 2 * h, t) + 8 * f(x + h, t) - 8 * f(x - h, t) + f(x - 2 * h, t)) / (12 * h);
  };
  Expression d = e;
  for (int order = 1; order <= 5; ++order) {
    const Expression next = e.dx(order);
    for (double x : {-0.4, 0.9, 1.7}) CHECK(next(x, 0.3) == doctest::Approx(fd_x(d, x, 0.3)).epsilon(1e-7));
    d = next;
  }
  const Expression dt = e.dt();
  for (double x : {-0.4, 0.9}) {
    const double h = 1e-4;
    CHECK(dt(x, 0.3) == doctest::Approx((e(x, 0.3 + h) - e(x, 0.3 - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("expression errors report the column") {
  CHECK_THROWS_WITH_AS(Expression::parse("sin(x*x)"), doctest::Contains("column"), ConfigError);
  CHECK_THROWS_AS(Expression::parse("2 + "), ConfigError);
  CHECK_THROWS_AS(Expression::parse("sin(x)*cos(x)"), ConfigError);
  CHECK_THROWS_WITH_AS(Expression::parse("exp(x)"), doctest::Contains("column 1"), ConfigError);
}

TEST_CASE("key-value files report lines") {
  CHECK_THROWS_WITH_AS(from_text("[run]\nk = 2\nk = 3\n"), doctest::Contains("test.cfg:3"), ConfigError);
  CHECK_THROWS_WITH_AS(from_text("[run\n"), doctest::Contains("test.cfg:1"), ConfigError);
  CHECK_THROWS_WITH_AS(from_text("# c\nnot a pair\n"), doctest::Contains("test.cfg:2"), ConfigError);
  const KeyValueFile f = from_text("[run]\nk = two  # comment\n");
  CHECK_THROWS_WITH_AS(parse_run_config(f), doctest::Contains("test.cfg:2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(from_text("[run]\nbogus = 1\n")), doctest::Contains("unknown key"),
                       ConfigError);
}

TEST_CASE("run config round-trips through its dump") {
  RunConfig c;
  c.problem = "P4";
  c.degree = 3;
  c.elements = 64;
  c.level_min = 2;
  c.level_max = 6;
  c.dt = 0.1 / 3.0;
  c.final_time = 0.1;
  c.mode = RunMode::Study;
  c.out = "table.csv";
  c.allow_unstable = true;
  StabilizationConfig t = StabilizationConfig::boundary_preset(1.0, -3.0);
  t.tau_F_rule = TauFRule::HalfSupFluxDeriv;
  c.tau_values = t;
  c.tau_preset = TauPreset::Custom;
  std::ostringstream os;
  dump_run_config(os, c);
  const RunConfig back = parse_run_config(from_text(os.str()));
  CHECK(back == c);

  RunConfig d;
  std::ostringstream os2;
  dump_run_config(os2, d);
  CHECK(parse_run_config(from_text(os2.str())) == d);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.degree = 9;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.degree = 2;
  c.elements = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.elements = 4;
  c.final_time = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(parse_run_config(from_text("[run]\nlevels = 3-5\n")), ConfigError);
}

TEST_CASE("custom problem manufactures forcing from exact_u") {
  const KeyValueFile f = from_text(
      "[problem]\nalpha = 1\nbeta = -1\nleft = 0\nright = 2*pi\nboundary = periodic\n"
      "flux = 0, 1, 1, 1\nexact_u = sin(x + t)\n");
  const ProblemSpec p = load_custom_problem(f);
  CHECK(p.domain_right == doctest::Approx(2 * std::numbers::pi));
  CHECK_THROWS_WITH_AS(load_custom_problem(from_text("[problem]\nleft = 0\nright = x\nexact_u = x\n")),
                       doctest::Contains("test.cfg:3"), ConfigError);
  const ProblemSpec ref = builtin_problem(BuiltinProblem::P2);
  for (double x : {0.2, 1.9, 5.0})
    for (double t : {0.0, 0.07}) {
      CHECK(p.exact->fields[0](x, t) == doctest::Approx(ref.exact->fields[0](x, t)));
      CHECK(p.exact->fields[4](x, t) == doctest::Approx(ref.exact->fields[4](x, t)));
      CHECK(p.forcing(x, t) == doctest::Approx(ref.forcing(x, t)));
    }
  for (double x : {0.2, 1.9}) CHECK(p.initial_operator(x) == doctest::Approx(ref.initial_operator(x)));
}

TEST_CASE("custom problem without exact solution needs forcing and initial data") {
  CHECK_THROWS_AS(load_custom_problem(from_text("[problem]\nleft = 0\nright = 1\ninitial = sin(x)\n")), ConfigError);
  const ProblemSpec p =
      load_custom_problem(from_text("[problem]\nleft = 0\nright = 1\nboundary = dirichlet\nforcing = 0\ninitial = x^2\n"));
  CHECK_FALSE(p.exact);
  REQUIRE(p.dirichlet);
  CHECK(p.dirichlet->u_right(0.3) == 0.0);
  CHECK(p.initial_operator(0.5) == 0.0);
}

TEST_CASE("tau preset defaults follow the boundary") {
  RunConfig c;
  CHECK(resolve_tau(c, builtin_problem(BuiltinProblem::P1)) == StabilizationConfig::periodic_preset());
  CHECK(resolve_tau(c, builtin_problem(BuiltinProblem::P3)) == StabilizationConfig::dirichlet_preset());
  const std::string path = temp_file("tau.cfg", "tau_su_minus = 2\ntau_rq_minus = -3\ntau_F_rule = half-sup\n");
  c.tau_preset = TauPreset::Custom;
  c.tau_file = path;
  const StabilizationConfig t = resolve_tau(c, builtin_problem(BuiltinProblem::P1));
  CHECK(t.tau_su_minus == 2.0);
  CHECK(t.tau_rq_minus == -3.0);
  CHECK(t.tau_F_rule == TauFRule::HalfSupFluxDeriv);
  std::remove(path.c_str());
}

TEST_CASE("run: exit codes") {
  std::ostringstream out, log;
  RunConfig c;
  c.problem = "P2";
  c.tau_preset = TauPreset::Zero;
  CHECK(run(c, out, log) == kExitUnstable);
  CHECK(log.str().find("tau_su-") != std::string::npos);

  c.mode = RunMode::StabilityCheck;
  std::ostringstream out2;
  CHECK(run(c, out2, log) == kExitUnstable);
  CHECK(out2.str().find("stability: fail") != std::string::npos);

  c.tau_preset.reset();
  std::ostringstream out3;
  CHECK(run(c, out3, log) == kExitOk);
  CHECK(out3.str() == "stability: pass\n");

  RunConfig bad;
  bad.problem = "Q1";
  CHECK(run(bad, out, log) == kExitConfig);

  RunConfig failing;
  failing.problem_file = "does-not-exist.cfg";
  CHECK(run(failing, out, log) == kExitConfig);
}

TEST_CASE("run: solve output is deterministic and includes one error row") {
  RunConfig c;
  c.problem = "P1";
  c.degree = 1;
  c.elements = 32;
  c.final_time = 0.1;
  std::ostringstream a, b, la, lb;
  REQUIRE(run(c, a, la) == kExitOk);
  REQUIRE(run(c, b, lb) == kExitOk);
  CHECK(a.str() == b.str());
  CHECK(la.str() == lb.str());
  CHECK(a.str().rfind("element,x,u,q,p,r,s\n", 0) == 0);
  std::istringstream lines(a.str());
  int count = 0;
  for (std::string line; std::getline(lines, line);) ++count;
  CHECK(count == 1 + 32 * 3);
  CHECK(la.str().find("L2 errors: e_u=") != std::string::npos);
}

TEST_CASE("run: study output is deterministic") {
  RunConfig c;
  c.problem = "P1";
  c.degree = 1;
  c.level_min = 3;
  c.level_max = 4;
  c.mode = RunMode::Study;
  std::ostringstream a, b, log;
  REQUIRE(run(c, a, log) == kExitOk);
  REQUIRE(run(c, b, log) == kExitOk);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("k,N,h,dt,e_u,eoc_u", 0) == 0);
}
