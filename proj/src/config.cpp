#include "hdg5/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hdg5/errors.hpp"
#include "hdg5/expression.hpp"

namespace hdg5 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Shortest text that reads back to the same double.
std::string exact_text(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile f;
  f.source_ = source;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError(where + "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "missing key before '='");
    const std::string full = section.empty() ? key : section + "." + key;
    if (f.entries_.count(full) != 0)
      throw ConfigError(where + "duplicate key '" + full + "' (first set on line " +
                        std::to_string(f.entries_[full].line) + ")");
    f.entries_[full] = Entry{trim(line.substr(eq + 1)), line_no};
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return parse(in, path);
}

const KeyValueFile::Entry* KeyValueFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void KeyValueFile::fail(const std::string& key, const std::string& what) const {
  const Entry* e = find(key);
  const std::string where = e != nullptr ? source_ + ":" + std::to_string(e->line) : source_;
  throw ConfigError(where + ": " + key + ": " + what);
}

std::optional<std::string> KeyValueFile::get_string(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) return std::nullopt;
  return e->value;
}

std::optional<double> KeyValueFile::get_double(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) return std::nullopt;
  const auto v = to_double(e->value);
  if (!v) fail(key, "expected a number, got '" + e->value + "'");
  return v;
}

std::optional<int> KeyValueFile::get_int(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) return std::nullopt;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || ptr != e->value.data() + e->value.size())
    fail(key, "expected an integer, got '" + e->value + "'");
  return v;
}

std::optional<bool> KeyValueFile::get_bool(const std::string& key) const {
  const Entry* e = find(key);
  if (e == nullptr) return std::nullopt;
  const std::string v = lower(e->value);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(key, "expected true or false, got '" + e->value + "'");
}

void KeyValueFile::reject_unknown(const std::vector<std::string>& known) const {
  for (const auto& [key, entry] : entries_)
    if (std::find(known.begin(), known.end(), key) == known.end()) fail(key, "unknown key");
}

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Solve: return "solve";
    case RunMode::Study: return "study";
    case RunMode::Superconvergence: return "superconvergence";
    case RunMode::StabilityCheck: return "stability-check";
  }
  return "solve";
}

RunMode parse_run_mode(const std::string& s) {
  for (RunMode m : {RunMode::Solve, RunMode::Study, RunMode::Superconvergence, RunMode::StabilityCheck})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown mode '" + s + "' (expected solve, study, superconvergence, stability-check)");
}

std::string to_string(TauPreset p) {
  switch (p) {
    case TauPreset::PaperPeriodic: return "paper-periodic";
    case TauPreset::PaperDirichlet: return "paper-dirichlet";
    case TauPreset::Zero: return "zero";
    case TauPreset::Custom: return "custom-file";
  }
  return "paper-periodic";
}

TauPreset parse_tau_preset(const std::string& s) {
  for (TauPreset p : {TauPreset::PaperPeriodic, TauPreset::PaperDirichlet, TauPreset::Zero, TauPreset::Custom})
    if (s == to_string(p)) return p;
  throw ConfigError("unknown tau preset '" + s + "' (expected paper-periodic, paper-dirichlet, zero, custom-file)");
}

void RunConfig::validate() const {
  if (degree < 0 || degree > 8) throw ConfigError("k must be in [0, 8], got " + std::to_string(degree));
  if (elements < 2) throw ConfigError("N must be at least 2, got " + std::to_string(elements));
  if (level_min < 1 || level_max < level_min || level_max > 16)
    throw ConfigError("levels must satisfy 1 <= A <= B <= 16, got " + std::to_string(level_min) + ":" +
                      std::to_string(level_max));
  if (dt && !(*dt > 0.0)) throw ConfigError("dt must be positive");
  if (final_time && !(*final_time > 0.0)) throw ConfigError("T must be positive");
  if (tau_preset == TauPreset::Custom && tau_file.empty() && !tau_values)
    throw ConfigError("tau preset custom-file needs --tau-file or a [tau] section");
}

namespace {

struct TauField {
  const char* name;
  double StabilizationConfig::*member;
};

constexpr TauField kTauFields[] = {
    {"tau_pu_plus", &StabilizationConfig::tau_pu_plus},   {"tau_pq_plus", &StabilizationConfig::tau_pq_plus},
    {"tau_ru_plus", &StabilizationConfig::tau_ru_plus},   {"tau_ru_minus", &StabilizationConfig::tau_ru_minus},
    {"tau_rq_plus", &StabilizationConfig::tau_rq_plus},   {"tau_rq_minus", &StabilizationConfig::tau_rq_minus},
    {"tau_rp_minus", &StabilizationConfig::tau_rp_minus}, {"tau_su_plus", &StabilizationConfig::tau_su_plus},
    {"tau_su_minus", &StabilizationConfig::tau_su_minus}, {"tau_sq_plus", &StabilizationConfig::tau_sq_plus},
    {"tau_sq_minus", &StabilizationConfig::tau_sq_minus}, {"tau_sp_minus", &StabilizationConfig::tau_sp_minus},
};

TauFRule parse_tau_F_rule(const std::string& s) {
  for (TauFRule r : {TauFRule::Zero, TauFRule::AbsFluxDerivAtTrace, TauFRule::HalfSupFluxDeriv})
    if (s == to_string(r)) return r;
  throw ConfigError("unknown tau_F rule '" + s + "' (expected zero, abs-trace, half-sup)");
}

std::string keyed(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

const std::vector<std::string> kRunKeys = {"problem", "problem_file", "k",    "N",    "levels",
                                           "dt",      "dt_policy",    "T",    "tau_preset", "tau_file",
                                           "mode",    "out",          "allow_unstable"};

}  // namespace

StabilizationConfig parse_tau_table(const KeyValueFile& file, const std::string& section) {
  StabilizationConfig c = StabilizationConfig::zero_preset();
  for (const auto& f : kTauFields)
    if (auto v = file.get_double(keyed(section, f.name))) c.*(f.member) = *v;
  if (auto r = file.get_string(keyed(section, "tau_F_rule"))) {
    try {
      c.tau_F_rule = parse_tau_F_rule(*r);
    } catch (const ConfigError& e) {
      file.fail(keyed(section, "tau_F_rule"), e.what());
    }
  }
  return c;
}

void dump_tau_table(std::ostream& os, const StabilizationConfig& c) {
  for (const auto& f : kTauFields) os << f.name << " = " << exact_text(c.*(f.member)) << '\n';
  os << "tau_F_rule = " << to_string(c.tau_F_rule) << '\n';
}

RunConfig parse_run_config(const KeyValueFile& file) {
  std::vector<std::string> known;
  for (const auto& k : kRunKeys) known.push_back("run." + k);
  for (const auto& f : kTauFields) known.push_back(std::string("tau.") + f.name);
  known.push_back("tau.tau_F_rule");
  file.reject_unknown(known);

  RunConfig c;
  auto with_line = [&file](const std::string& key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      if (file.has(key)) file.fail(key, e.what());
      throw;
    }
  };
  if (auto v = file.get_string("run.problem")) c.problem = *v;
  if (auto v = file.get_string("run.problem_file")) c.problem_file = *v;
  if (auto v = file.get_int("run.k")) c.degree = *v;
  if (auto v = file.get_int("run.N")) c.elements = *v;
  if (auto v = file.get_string("run.levels")) {
    const auto colon = v->find(':');
    int a = 0, b = 0;
    bool ok = colon != std::string::npos;
    if (ok) {
      const std::string sa = trim(v->substr(0, colon)), sb = trim(v->substr(colon + 1));
      ok = std::from_chars(sa.data(), sa.data() + sa.size(), a).ptr == sa.data() + sa.size() && !sa.empty() &&
           std::from_chars(sb.data(), sb.data() + sb.size(), b).ptr == sb.data() + sb.size() && !sb.empty();
    }
    if (!ok) file.fail("run.levels", "expected A:B, got '" + *v + "'");
    c.level_min = a;
    c.level_max = b;
  }
  c.dt = file.get_double("run.dt");
  if (auto v = file.get_string("run.dt_policy")) {
    if (*v != "paper") file.fail("run.dt_policy", "only 'paper' is supported; give dt for a fixed step");
    if (c.dt) file.fail("run.dt_policy", "dt_policy = paper conflicts with dt");
  }
  c.final_time = file.get_double("run.T");
  if (auto v = file.get_string("run.tau_preset")) with_line("run.tau_preset", [&] { c.tau_preset = parse_tau_preset(*v); });
  if (auto v = file.get_string("run.tau_file")) c.tau_file = *v;
  bool has_tau_section = false;
  for (const auto& [key, entry] : file.entries())
    if (key.rfind("tau.", 0) == 0) has_tau_section = true;
  if (has_tau_section) c.tau_values = parse_tau_table(file, "tau");
  if (auto v = file.get_string("run.mode")) with_line("run.mode", [&] { c.mode = parse_run_mode(*v); });
  if (auto v = file.get_string("run.out")) c.out = *v;
  if (auto v = file.get_bool("run.allow_unstable")) c.allow_unstable = *v;
  with_line("", [&] { c.validate(); });
  return c;
}

void dump_run_config(std::ostream& os, const RunConfig& c) {
  os << "[run]\n";
  os << "problem = " << c.problem << '\n';
  if (!c.problem_file.empty()) os << "problem_file = " << c.problem_file << '\n';
  os << "k = " << c.degree << '\n';
  os << "N = " << c.elements << '\n';
  os << "levels = " << c.level_min << ':' << c.level_max << '\n';
  if (c.dt)
    os << "dt = " << exact_text(*c.dt) << '\n';
  else
    os << "dt_policy = paper\n";
  if (c.final_time) os << "T = " << exact_text(*c.final_time) << '\n';
  if (c.tau_preset) os << "tau_preset = " << to_string(*c.tau_preset) << '\n';
  if (!c.tau_file.empty()) os << "tau_file = " << c.tau_file << '\n';
  os << "mode = " << to_string(c.mode) << '\n';
  if (!c.out.empty()) os << "out = " << c.out << '\n';
  os << "allow_unstable = " << (c.allow_unstable ? "true" : "false") << '\n';
  if (c.tau_values) {
    os << "\n[tau]\n";
    dump_tau_table(os, *c.tau_values);
  }
}

namespace {

Expression parse_expression(const KeyValueFile& file, const std::string& key) {
  try {
    return Expression::parse(*file.get_string(key));
  } catch (const ConfigError& e) {
    file.fail(key, e.what());
  }
}

// Constant such as "2*pi"; any x or t dependence is rejected.
std::optional<double> parse_constant(const KeyValueFile& file, const std::string& key) {
  if (!file.has(key)) return std::nullopt;
  const Expression e = parse_expression(file, key);
  for (const Term& t : e.terms())
    if (t.x_power != 0 || t.t_power != 0 || (t.trig != Term::Trig::One && (t.a != 0.0 || t.b != 0.0)))
      file.fail(key, "expected a constant");
  return e(0.0, 0.0);
}

std::vector<double> parse_list(const KeyValueFile& file, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(*file.get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = to_double(trim(item));
    if (!v) file.fail(key, "expected comma-separated numbers, got '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace

ProblemSpec load_custom_problem(const KeyValueFile& file) {
  file.reject_unknown({"problem.name", "problem.alpha", "problem.beta", "problem.left", "problem.right",
                       "problem.boundary", "problem.final_time", "problem.flux", "problem.exact_u",
                       "problem.forcing", "problem.initial"});
  ProblemSpec p;
  p.name = file.get_string("problem.name").value_or("custom");
  p.alpha = file.get_double("problem.alpha").value_or(0.0);
  p.beta = file.get_double("problem.beta").value_or(-1.0);
  if (!(p.beta < 0.0)) file.fail("problem.beta", "beta must be negative");
  const auto left = parse_constant(file, "problem.left");
  const auto right = parse_constant(file, "problem.right");
  if (!left || !right) throw ConfigError(file.source() + ": [problem] needs left and right");
  p.domain_left = *left;
  p.domain_right = *right;
  if (!(p.domain_right > p.domain_left)) file.fail("problem.right", "right must exceed left");
  const std::string boundary = lower(file.get_string("problem.boundary").value_or("periodic"));
  if (boundary == "periodic")
    p.boundary = BoundaryKind::Periodic;
  else if (boundary == "dirichlet")
    p.boundary = BoundaryKind::Dirichlet;
  else
    file.fail("problem.boundary", "expected periodic or dirichlet");
  if (auto T = file.get_double("problem.final_time")) {
    if (!(*T > 0.0)) file.fail("problem.final_time", "must be positive");
    p.final_time = *T;
  }
  if (file.has("problem.flux")) p.flux = Flux::polynomial(parse_list(file, "problem.flux"));

  const double alpha = p.alpha, beta = p.beta;
  const Flux flux = p.flux;

  std::optional<Expression> exact;
  if (file.has("problem.exact_u")) exact = parse_expression(file, "problem.exact_u");

  if (exact) {
    ExactSolution ex;
    Expression d = *exact;
    for (int v = 0; v < 5; ++v) {
      ex.fields[v] = [d](double x, double t) { return d(x, t); };
      d = d.dx();
    }
    const Expression ut = exact->dt();
    ex.u_t = [ut](double x, double t) { return ut(x, t); };
    p.exact = ex;
  }

  if (file.has("problem.forcing")) {
    const Expression f = parse_expression(file, "problem.forcing");
    p.forcing = [f](double x, double t) { return f(x, t); };
  } else if (exact) {
    const Expression u = *exact, ut = exact->dt(), ux = exact->dx(), u3 = exact->dx(3), u5 = exact->dx(5);
    p.forcing = [=](double x, double t) {
      const double fprime = flux.is_zero ? 0.0 : flux.derivative(u(x, t));
      return ut(x, t) + alpha * u3(x, t) + beta * u5(x, t) + fprime * ux(x, t);
    };
  } else {
    throw ConfigError(file.source() + ": [problem] needs forcing when exact_u is absent");
  }

  std::optional<Expression> initial;
  if (file.has("problem.initial"))
    initial = parse_expression(file, "problem.initial");
  else if (exact)
    initial = *exact;
  else
    throw ConfigError(file.source() + ": [problem] needs initial when exact_u is absent");
  const Expression u0 = *initial, u0x = initial->dx(), u03 = initial->dx(3), u05 = initial->dx(5);
  p.initial = [u0](double x) { return u0(x, 0.0); };
  p.initial_operator = [=](double x) {
    const double fprime = flux.is_zero ? 0.0 : flux.derivative(u0(x, 0.0));
    return alpha * u03(x, 0.0) + beta * u05(x, 0.0) + fprime * u0x(x, 0.0);
  };

  if (p.boundary == BoundaryKind::Dirichlet) {
    if (p.exact) {
      p.dirichlet = dirichlet_from_exact(*p.exact, p.domain_left, p.domain_right);
    } else {
      const TimeFunction zero = [](double) { return 0.0; };
      p.dirichlet = DirichletData{zero, zero, zero, zero, zero};
    }
  }
  p.validate();
  return p;
}

}  // namespace hdg5
