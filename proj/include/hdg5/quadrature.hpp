#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

namespace hdg5 {

/// Value and first derivative of the Legendre polynomial P_k at x in [-1, 1],
/// normalized so that P_k(1) = 1. Three-term recurrence.
template <typename Scalar>
std::pair<Scalar, Scalar> legendre_with_derivative(int k, Scalar x) {
  if (k == 0) return {Scalar(1), Scalar(0)};
  Scalar p_prev = Scalar(1), p = x;
  Scalar dp_prev = Scalar(0), dp = Scalar(1);
  for (int n = 1; n < k; ++n) {
    const Scalar a = Scalar(2 * n + 1) / Scalar(n + 1);
    const Scalar b = Scalar(n) / Scalar(n + 1);
    const Scalar p_next = a * x * p - b * p_prev;
    // P'_{n+1} = P'_{n-1} + (2n+1) P_n
    const Scalar dp_next = dp_prev + Scalar(2 * n + 1) * p;
    p_prev = p;
    p = p_next;
    dp_prev = dp;
    dp = dp_next;
  }
  return {p, dp};
}

template <typename Scalar>
Scalar legendre(int k, Scalar x) {
  return legendre_with_derivative(k, x).first;
}

/// Gauss-Legendre rule on [-1, 1]. Exact for polynomials of degree <= 2n-1.
template <typename Scalar>
struct GaussLegendre {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: need at least one point");
    using std::abs;
    using std::cos;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      // Chebyshev-like initial guess, then Newton on P_n.
      Scalar x = cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
      for (int it = 0; it < 100; ++it) {
        const auto [p, dp] = legendre_with_derivative<Scalar>(n, x);
        const Scalar dx = p / dp;
        x -= dx;
        if (abs(dx) <= Scalar(4) * std::numeric_limits<Scalar>::epsilon()) break;
      }
      const Scalar dp = legendre_with_derivative<Scalar>(n, x).second;
      const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
      nodes[i] = -x;
      nodes[n - 1 - i] = x;
      weights[i] = w;
      weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = Scalar(0);
  }

  int size() const { return static_cast<int>(nodes.size()); }

  template <typename Fn>
  Scalar integrate(Fn&& f) const {
    Scalar sum(0);
    for (int i = 0; i < size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

}  // namespace hdg5
