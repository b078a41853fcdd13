#include "hdg5/stabilization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hdg5/errors.hpp"

namespace hdg5 {

StabilizationConfig StabilizationConfig::periodic_preset() {
  StabilizationConfig c;
  c.tau_rq_plus = c.tau_rq_minus = -1.0;
  c.tau_su_plus = c.tau_su_minus = 1.0;
  return c;
}

StabilizationConfig StabilizationConfig::dirichlet_preset() {
  StabilizationConfig c;
  c.tau_su_plus = c.tau_su_minus = 1.0;
  c.tau_sq_plus = c.tau_sq_minus = 1.0;
  c.tau_ru_plus = c.tau_ru_minus = 1.0;
  c.tau_rq_plus = c.tau_rq_minus = -1.0;
  return c;
}

StabilizationConfig StabilizationConfig::zero_preset() { return StabilizationConfig{}; }

StabilizationConfig StabilizationConfig::boundary_preset(double alpha, double beta) {
  StabilizationConfig c;
  const double ratio = alpha / beta;
  c.tau_su_plus = 0.0;
  c.tau_rq_plus = alpha / (2.0 * beta);
  c.tau_su_minus = 0.5 * ratio * ratio;
  c.tau_rq_minus = -alpha / (2.0 * beta);
  return c;
}

namespace {

// a >= b up to rounding in the operands.
bool at_least(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return a >= b - 1e-13 * scale;
}

}  // namespace

StabilityReport check_stability(const StabilizationConfig& c, double alpha, double beta, bool nonzero_flux) {
  if (!(beta < 0.0)) throw InvalidProblemError("check_stability: beta must be negative");
  namespace sc = stability_condition;
  StabilityReport report;
  auto require = [&](bool ok, const char* name) {
    if (!ok) {
      report.pass = false;
      report.violated.emplace_back(name);
    }
  };
  const double ab = alpha / beta;
  const double half_ab = alpha / (2.0 * beta);

  require(!(nonzero_flux && c.tau_F_rule == TauFRule::Zero), sc::kTauF);

  const double su_plus_margin = c.tau_su_plus + ab * c.tau_pu_plus - 0.5 * c.tau_pu_plus * c.tau_pu_plus;
  const double rq_plus_margin = -c.tau_rq_plus + half_ab - 0.5 * c.tau_pq_plus * c.tau_pq_plus;
  require(at_least(su_plus_margin, 0.0) || at_least(rq_plus_margin, 0.0), sc::kPlusEither);

  const double plus_cross = c.tau_sq_plus - c.tau_ru_plus + ab * c.tau_pq_plus - c.tau_pu_plus * c.tau_pq_plus;
  require(at_least(su_plus_margin * rq_plus_margin, 0.25 * plus_cross * plus_cross), sc::kPlusProduct);

  const double sp = c.tau_sp_minus + ab;
  require(at_least(c.tau_su_minus, 0.5 * sp * sp), sc::kMinusSu);
  require(at_least(-half_ab - 0.5 * c.tau_rp_minus * c.tau_rp_minus, c.tau_rq_minus), sc::kMinusRq);

  const double minus_cross = c.tau_sq_minus - c.tau_ru_minus;
  require(at_least(-c.tau_su_minus * (c.tau_rq_minus + half_ab), 0.25 * minus_cross * minus_cross),
          sc::kMinusProduct);
  return report;
}

double tau_F_value(TauFRule rule, const std::function<double(double)>& flux_derivative, double u_h, double u_hat) {
  switch (rule) {
    case TauFRule::Zero:
      return 0.0;
    case TauFRule::AbsFluxDerivAtTrace:
      return std::abs(flux_derivative(u_hat));
    case TauFRule::HalfSupFluxDeriv: {
      const double lo = std::min(u_h, u_hat);
      const double hi = std::max(u_h, u_hat);
      double sup = std::max(std::abs(flux_derivative(lo)), std::abs(flux_derivative(hi)));
      const double mid = 0.5 * (lo + hi);
      const double rad = 0.5 * (hi - lo);
      constexpr int kChebyshev = 8;
      for (int j = 0; j < kChebyshev; ++j) {
        const double s = mid + rad * std::cos((2 * j + 1) * std::numbers::pi / (2 * kChebyshev));
        sup = std::max(sup, std::abs(flux_derivative(s)));
      }
      return 0.5 * sup;
    }
  }
  return 0.0;
}

std::string to_string(TauFRule rule) {
  switch (rule) {
    case TauFRule::Zero: return "zero";
    case TauFRule::AbsFluxDerivAtTrace: return "abs-trace";
    case TauFRule::HalfSupFluxDeriv: return "half-sup";
  }
  return "?";
}

}  // namespace hdg5
