#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

#include "hdg5/mesh.hpp"
#include "hdg5/quadrature.hpp"

namespace hdg5 {

/// Legendre modal basis P_0..P_k on the reference element [-1, 1], tabulated
/// at the Gauss points of the attached rule and at both endpoints.
class ReferenceBasis {
 public:
  ReferenceBasis(int degree, int quadrature_points);

  /// n_q = k + 2 for linear flux, 2k + 2 when the flux is nonlinear.
  static ReferenceBasis for_problem(int degree, bool nonlinear_flux);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  const GaussLegendre<double>& quadrature() const { return quad_; }

  /// values()(q, j) = P_j(xi_q); derivatives() holds dP_j/dxi.
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::MatrixXd& derivatives() const { return derivatives_; }
  /// P_j(-1) = (-1)^j and P_j(+1) = 1.
  const Eigen::VectorXd& left_values() const { return left_; }
  const Eigen::VectorXd& right_values() const { return right_; }

  /// Reference mass: integral of P_i P_j over [-1, 1] = 2 / (2i + 1) on the diagonal.
  Eigen::VectorXd reference_mass() const;
  /// weak_derivative()(i, j) = integral of P_j * P_i' over [-1, 1] (test i, trial j).
  const Eigen::MatrixXd& weak_derivative() const { return weak_derivative_; }

 private:
  int degree_;
  GaussLegendre<double> quad_;
  Eigen::MatrixXd values_;
  Eigen::MatrixXd derivatives_;
  Eigen::VectorXd left_;
  Eigen::VectorXd right_;
  Eigen::MatrixXd weak_derivative_;
};

enum class Var { u = 0, q = 1, p = 2, r = 3, s = 4 };
inline constexpr std::array<Var, 5> kAllVars = {Var::u, Var::q, Var::p, Var::r, Var::s};
inline constexpr std::array<const char*, 5> kVarNames = {"u", "q", "p", "r", "s"};

inline int index(Var v) { return static_cast<int>(v); }

/// Modal coefficients of a single piecewise polynomial: column e-1 holds element e.
using ModalField = Eigen::MatrixXd;

/// Five-variable discrete solution (u, q, p, r, s), each (k+1) x N.
struct SolutionField {
  SolutionField() = default;
  SolutionField(int degree, int elements);

  int degree() const { return static_cast<int>(vars[0].rows()) - 1; }
  int elements() const { return static_cast<int>(vars[0].cols()); }

  ModalField& operator[](Var v) { return vars[index(v)]; }
  const ModalField& operator[](Var v) const { return vars[index(v)]; }

  std::array<ModalField, 5> vars;
};

SolutionField operator+(const SolutionField& a, const SolutionField& b);
SolutionField operator-(const SolutionField& a, const SolutionField& b);
SolutionField operator*(double c, const SolutionField& a);

/// Physical coordinate of reference point xi on element e.
inline double to_physical(const Mesh& mesh, int element, double xi) {
  return 0.5 * (mesh.left(element) + mesh.right(element)) + 0.5 * mesh.width(element) * xi;
}

/// Evaluates the element polynomial with the given coefficients at reference point xi.
double evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, double xi);

using SpaceFunction = std::function<double(double)>;

/// Element-wise L2 projection onto P_k using the basis quadrature.
ModalField l2_project(const SpaceFunction& f, const Mesh& mesh, const ReferenceBasis& basis);

/// L2 norm of (f - field) with n_q + 3 Gauss points per element.
double l2_error(const SpaceFunction& f, const ModalField& field, const Mesh& mesh, const ReferenceBasis& basis);

/// L2 norm of a piecewise polynomial (exact through the orthogonal modes).
double l2_norm(const ModalField& field, const Mesh& mesh);

}  // namespace hdg5
