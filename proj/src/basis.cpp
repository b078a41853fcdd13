#include "hdg5/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hdg5 {

ReferenceBasis::ReferenceBasis(int degree, int quadrature_points)
    : degree_(degree), quad_(quadrature_points) {
  if (degree < 0) throw std::invalid_argument("ReferenceBasis: negative degree");
  const int n = degree + 1;
  const int nq = quad_.size();
  values_.resize(nq, n);
  derivatives_.resize(nq, n);
  for (int q = 0; q < nq; ++q) {
    for (int j = 0; j < n; ++j) {
      const auto [p, dp] = legendre_with_derivative(j, quad_.nodes[q]);
      values_(q, j) = p;
      derivatives_(q, j) = dp;
    }
  }
  left_.resize(n);
  right_.resize(n);
  for (int j = 0; j < n; ++j) {
    left_[j] = (j % 2 == 0) ? 1.0 : -1.0;
    right_[j] = 1.0;
  }
  // P_j P_i' has degree <= 2k - 1, so any rule with n_q >= k is exact; integrate
  // with a dedicated rule so the table does not depend on the attached n_q.
  GaussLegendre<double> exact(n);
  weak_derivative_ = Eigen::MatrixXd::Zero(n, n);
  for (int q = 0; q < exact.size(); ++q) {
    for (int i = 0; i < n; ++i) {
      const double dpi = legendre_with_derivative(i, exact.nodes[q]).second;
      for (int j = 0; j < n; ++j)
        weak_derivative_(i, j) += exact.weights[q] * legendre(j, exact.nodes[q]) * dpi;
    }
  }
}

ReferenceBasis ReferenceBasis::for_problem(int degree, bool nonlinear_flux) {
  return ReferenceBasis(degree, nonlinear_flux ? 2 * degree + 2 : degree + 2);
}

Eigen::VectorXd ReferenceBasis::reference_mass() const {
  Eigen::VectorXd m(size());
  for (int j = 0; j < size(); ++j) m[j] = 2.0 / (2 * j + 1);
  return m;
}

SolutionField::SolutionField(int degree, int elements) {
  for (auto& v : vars) v = ModalField::Zero(degree + 1, elements);
}

SolutionField operator+(const SolutionField& a, const SolutionField& b) {
  SolutionField out = a;
  for (int i = 0; i < 5; ++i) out.vars[i] += b.vars[i];
  return out;
}

SolutionField operator-(const SolutionField& a, const SolutionField& b) {
  SolutionField out = a;
  for (int i = 0; i < 5; ++i) out.vars[i] -= b.vars[i];
  return out;
}

SolutionField operator*(double c, const SolutionField& a) {
  SolutionField out = a;
  for (auto& v : out.vars) v *= c;
  return out;
}

double evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, double xi) {
  double sum = 0.0;
  for (int j = 0; j < coeffs.size(); ++j) sum += coeffs[j] * legendre(j, xi);
  return sum;
}

ModalField l2_project(const SpaceFunction& f, const Mesh& mesh, const ReferenceBasis& basis) {
  const int n = basis.size();
  const auto& quad = basis.quadrature();
  const Eigen::VectorXd mass = basis.reference_mass();
  ModalField out(n, mesh.element_count());
  for (int e = 1; e <= mesh.element_count(); ++e) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int q = 0; q < quad.size(); ++q) {
      const double fx = f(to_physical(mesh, e, quad.nodes[q]));
      rhs += quad.weights[q] * fx * basis.values().row(q).transpose();
    }
    out.col(e - 1) = rhs.cwiseQuotient(mass);
  }
  return out;
}

double l2_error(const SpaceFunction& f, const ModalField& field, const Mesh& mesh, const ReferenceBasis& basis) {
  const GaussLegendre<double> quad(basis.quadrature().size() + 3);
  double sum = 0.0;
  for (int e = 1; e <= mesh.element_count(); ++e) {
    double local = 0.0;
    for (int q = 0; q < quad.size(); ++q) {
      const double diff = f(to_physical(mesh, e, quad.nodes[q])) - evaluate(field.col(e - 1), quad.nodes[q]);
      local += quad.weights[q] * diff * diff;
    }
    sum += 0.5 * mesh.width(e) * local;
  }
  return std::sqrt(sum);
}

double l2_norm(const ModalField& field, const Mesh& mesh) {
  double sum = 0.0;
  for (int e = 1; e <= mesh.element_count(); ++e) {
    for (int j = 0; j < field.rows(); ++j) {
      const double c = field(j, e - 1);
      sum += 0.5 * mesh.width(e) * 2.0 / (2 * j + 1) * c * c;
    }
  }
  return std::sqrt(sum);
}

}  // namespace hdg5
