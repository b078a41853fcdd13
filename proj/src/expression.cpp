#include "hdg5/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "hdg5/errors.hpp"

namespace hdg5 {

double Term::operator()(double x, double t) const {
  double v = coeff * std::pow(t, t_power) * std::pow(x, x_power);
  switch (trig) {
    case Trig::One: break;
    case Trig::Sin: v *= std::sin(a * x + b * t + phase); break;
    case Trig::Cos: v *= std::cos(a * x + b * t + phase); break;
  }
  return v;
}

double Expression::operator()(double x, double t) const {
  double s = 0.0;
  for (const Term& term : terms_) s += term(x, t);
  return s;
}

namespace {

// d/dvar of one term, where power/rate select x or t.
void differentiate(const Term& term, bool wrt_x, std::vector<Term>& out) {
  const int power = wrt_x ? term.x_power : term.t_power;
  const double rate = wrt_x ? term.a : term.b;
  if (power > 0) {
    Term d = term;
    d.coeff *= power;
    (wrt_x ? d.x_power : d.t_power) -= 1;
    out.push_back(d);
  }
  if (term.trig != Term::Trig::One && rate != 0.0) {
    Term d = term;
    if (term.trig == Term::Trig::Sin) {
      d.trig = Term::Trig::Cos;
      d.coeff *= rate;
    } else {
      d.trig = Term::Trig::Sin;
      d.coeff *= -rate;
    }
    out.push_back(d);
  }
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Expression parse() {
    std::vector<Term> terms;
    skip();
    if (at_end()) fail("empty expression");
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') sign = take() == '-' ? -1.0 : 1.0;
    for (;;) {
      Term t = term();
      t.coeff *= sign;
      terms.push_back(t);
      skip();
      if (at_end()) break;
      const char c = take();
      if (c != '+' && c != '-') fail("expected '+' or '-'", pos_ - 1);
      sign = c == '-' ? -1.0 : 1.0;
    }
    return Expression(std::move(terms));
  }

 private:
  Term term() {
    Term t;
    t.coeff = 1.0;
    bool have_trig = false;
    for (;;) {
      skip();
      if (at_end()) fail("expected a factor");
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.coeff *= number();
      } else if (match("sin")) {
        if (have_trig) fail("at most one sin/cos factor per term");
        have_trig = true;
        t.trig = Term::Trig::Sin;
        argument(t);
      } else if (match("cos")) {
        if (have_trig) fail("at most one sin/cos factor per term");
        have_trig = true;
        t.trig = Term::Trig::Cos;
        argument(t);
      } else if (c == 'x' || c == 't') {
        take();
        (c == 'x' ? t.x_power : t.t_power) += exponent();
      } else if (c == 'p' && match("pi")) {
        t.coeff *= std::numbers::pi;
      } else {
        fail(std::string("unexpected '") + c + "'");
      }
      skip();
      if (!at_end() && peek() == '*') {
        take();
        continue;
      }
      return t;
    }
  }

  // "(a*x + b*t + c)"
  void argument(Term& t) {
    skip();
    if (at_end() || take() != '(') fail("expected '('", pos_ - 1);
    skip();
    double sign = 1.0;
    if (!at_end() && (peek() == '+' || peek() == '-')) sign = take() == '-' ? -1.0 : 1.0;
    for (;;) {
      skip();
      double c = 1.0;
      bool have_number = false;
      char var = 0;
      for (;;) {
        skip();
        if (at_end()) fail("unterminated argument");
        const char ch = peek();
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
          c *= number();
          have_number = true;
        } else if (ch == 'p' && match("pi")) {
          c *= std::numbers::pi;
          have_number = true;
        } else if (ch == 'x' || ch == 't') {
          if (var != 0) fail("argument must be linear in x and t");
          var = take();
        } else {
          fail(std::string("unexpected '") + ch + "' in argument");
        }
        skip();
        if (!at_end() && peek() == '*') {
          take();
          continue;
        }
        break;
      }
      if (var == 0 && !have_number) fail("empty argument term");
      c *= sign;
      if (var == 'x') t.a += c;
      else if (var == 't') t.b += c;
      else t.phase += c;
      skip();
      if (at_end()) fail("unterminated argument");
      const char ch = take();
      if (ch == ')') return;
      if (ch != '+' && ch != '-') fail("expected '+', '-' or ')'", pos_ - 1);
      sign = ch == '-' ? -1.0 : 1.0;
    }
  }

  int exponent() {
    skip();
    if (at_end() || peek() != '^') return 1;
    take();
    skip();
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected a non-negative integer exponent");
    return std::stoi(s_.substr(start, pos_ - start));
  }

  double number() {
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  bool match(const char* word) {
    const std::string w(word);
    if (s_.compare(pos_, w.size(), w) != 0) return false;
    pos_ += w.size();
    return true;
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  char take() { return s_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }
  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw ConfigError("expression '" + s_ + "', column " + std::to_string(at + 1) + ": " + what);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) { return Parser(text).parse(); }

Expression Expression::dx(int order) const {
  Expression e = *this;
  for (int i = 0; i < order; ++i) {
    std::vector<Term> out;
    for (const Term& t : e.terms_) differentiate(t, true, out);
    e.terms_ = std::move(out);
  }
  return e;
}

Expression Expression::dt() const {
  std::vector<Term> out;
  for (const Term& t : terms_) differentiate(t, false, out);
  return Expression(std::move(out));
}

}  // namespace hdg5
