#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hdg5 {

/// How the flux penalty tau_F is evaluated at a face.
enum class TauFRule {
  Zero,                 ///< tau_F = 0 (only stable for F == 0)
  AbsFluxDerivAtTrace,  ///< tau_F = |F'(u_hat)|
  HalfSupFluxDeriv,     ///< tau_F = 1/2 max |F'(s)| for s between u_h and u_hat
};

/// Penalty coefficients of the derived numerical traces. A "plus" entry acts at
/// the left face x_{i-1}^+ of an element, a "minus" entry at its right face x_i^-.
struct StabilizationConfig {
  double tau_pu_plus = 0.0;
  double tau_pq_plus = 0.0;
  double tau_ru_plus = 0.0;
  double tau_ru_minus = 0.0;
  double tau_rq_plus = 0.0;
  double tau_rq_minus = 0.0;
  double tau_rp_minus = 0.0;
  double tau_su_plus = 0.0;
  double tau_su_minus = 0.0;
  double tau_sq_plus = 0.0;
  double tau_sq_minus = 0.0;
  double tau_sp_minus = 0.0;
  TauFRule tau_F_rule = TauFRule::AbsFluxDerivAtTrace;

  bool operator==(const StabilizationConfig&) const = default;

  /// tau_rq = -1, tau_su = 1 on both sides, everything else zero. This is also
  /// the configuration assumed by the projection error analysis.
  static StabilizationConfig periodic_preset();
  /// tau_su = tau_sq = tau_ru = 1, tau_rq = -1 on both sides.
  static StabilizationConfig dirichlet_preset();
  static StabilizationConfig zero_preset();
  /// The simple family with every inequality active: tau_su^+ = 0,
  /// tau_rq^+ = alpha/(2 beta), tau_su^- = (alpha/beta)^2 / 2, tau_rq^- = -alpha/(2 beta).
  static StabilizationConfig boundary_preset(double alpha, double beta);
};

/// Names of the conditions reported by check_stability.
namespace stability_condition {
inline constexpr const char* kTauF = "tau_F >= tilde_tau (nonzero flux needs a tau_F rule)";
inline constexpr const char* kPlusEither =
    "tau_su+ >= -(alpha/beta) tau_pu+ + (tau_pu+)^2/2  or  tau_rq+ <= alpha/(2 beta) - (tau_pq+)^2/2";
inline constexpr const char* kPlusProduct =
    "(tau_su+ + (alpha/beta) tau_pu+ - (tau_pu+)^2/2)(-tau_rq+ + alpha/(2 beta) - (tau_pq+)^2/2) >= "
    "(tau_sq+ - tau_ru+ + (alpha/beta) tau_pq+ - tau_pu+ tau_pq+)^2/4";
inline constexpr const char* kMinusSu = "tau_su- >= (tau_sp- + alpha/beta)^2/2";
inline constexpr const char* kMinusRq = "tau_rq- <= -alpha/(2 beta) - (tau_rp-)^2/2";
inline constexpr const char* kMinusProduct = "-tau_su- (tau_rq- + alpha/(2 beta)) >= (tau_sq- - tau_ru-)^2/4";
}  // namespace stability_condition

struct StabilityReport {
  bool pass = true;
  std::vector<std::string> violated;
};

/// Evaluates the sufficient L2-stability conditions on the penalty table.
/// Throws InvalidProblemError if beta >= 0.
StabilityReport check_stability(const StabilizationConfig& cfg, double alpha, double beta,
                                bool nonzero_flux = false);

/// tau_F at one face for the given rule; u_h is the element trace, u_hat the numerical trace.
double tau_F_value(TauFRule rule, const std::function<double(double)>& flux_derivative, double u_h, double u_hat);

std::string to_string(TauFRule rule);

}  // namespace hdg5
