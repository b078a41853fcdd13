#pragma once

#include <string>
#include <vector>

namespace hdg5 {

/// One product c * t^m * x^n * trig(a x + b t + phase), trig in {1, sin, cos}.
/// The set of sums of such terms is closed under d/dx and d/dt.
struct Term {
  enum class Trig { One, Sin, Cos };
  double coeff = 0.0;
  int t_power = 0;
  int x_power = 0;
  Trig trig = Trig::One;
  double a = 0.0;
  double b = 0.0;
  double phase = 0.0;

  double operator()(double x, double t) const;
};

/// Sum of terms in x and t, parsed from text such as
///   "2*sin(x + t) - 0.5*t^2*cos(3*x) + x^3 - 1".
/// Factors of a term: numbers, x, x^m, t, t^m and at most one sin(...) or
/// cos(...) whose argument is a linear combination of x, t and a constant.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::vector<Term> terms) : terms_(std::move(terms)) {}

  /// Throws ConfigError with the column of the offending character.
  static Expression parse(const std::string& text);

  double operator()(double x, double t = 0.0) const;
  Expression dx(int order = 1) const;
  Expression dt() const;
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

}  // namespace hdg5
