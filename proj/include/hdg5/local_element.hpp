#pragma once

#include <array>

#include <Eigen/Core>
#include <Eigen/LU>

#include "hdg5/basis.hpp"
#include "hdg5/mesh.hpp"
#include "hdg5/problem.hpp"
#include "hdg5/stabilization.hpp"

namespace hdg5 {

/// Trace inputs of one element, in this order: u-hat at x_{i-1}, u-hat at x_i,
/// q-hat at x_{i-1}, q-hat at x_i, p-hat^- at x_i.
using TraceInputs = Eigen::Matrix<double, 5, 1>;
namespace trace {
inline constexpr int kULeft = 0;
inline constexpr int kURight = 1;
inline constexpr int kQLeft = 2;
inline constexpr int kQRight = 3;
inline constexpr int kPRight = 4;
}  // namespace trace

/// Stacked element coefficients (u, q, p, r, s), each of length k+1.
using ElementState = Eigen::VectorXd;

inline auto block(ElementState& x, Var v, int n) { return x.segment(index(v) * n, n); }
inline auto block(const ElementState& x, Var v, int n) { return x.segment(index(v) * n, n); }

/// A scalar that depends affinely (linearly, no constant) on the element state
/// and its trace inputs.
struct AffineTrace {
  Eigen::RowVectorXd on_state;
  Eigen::Matrix<double, 1, 5> on_traces = Eigen::Matrix<double, 1, 5>::Zero();

  double operator()(const ElementState& x, const TraceInputs& t) const { return on_state.dot(x) + on_traces.dot(t); }
};

/// Numerical traces at both faces of an element.
enum class FaceQuantity { PPlus, RPlus, SPlus, PMinus, RMinus, SMinus, FluxLeft, FluxRight };
inline constexpr int kFaceQuantities = 8;

struct FaceData {
  std::array<double, kFaceQuantities> values{};
  double operator[](FaceQuantity f) const { return values[static_cast<int>(f)]; }
};

/// Where the nonlinear flux is linearized, together with the frozen tau_F values.
struct FluxLinearization {
  const Flux* flux = nullptr;
  Eigen::VectorXd u;  ///< modal coefficients of u_h on the element
  double u_hat_left = 0.0;
  double u_hat_right = 0.0;
  double tau_F_left = 0.0;
  double tau_F_right = 0.0;
};

struct LocalParameters {
  double gamma = 1.0;
  double alpha = 0.0;
  double beta = -1.0;
  StabilizationConfig cfg;
};

/// The 5(k+1) local Galerkin equations of one element with the derived traces
/// (p-hat^+, r-hat, s-hat, F-hat) substituted, written as
///
///   R(x, t) = A_lin x + B_lin t + N(x, t) - load,
///
/// where N collects the flux terms F(u_h) and F(u_hat). The Jacobian blocks
/// A = dR/dx and B = dR/dt are evaluated at the linearization point and A is
/// LU-factorized. Without a linearization the flux is dropped (F = 0, tau_F = 0)
/// and the operator is exactly affine.
class LocalOperator {
 public:
  LocalOperator(const ReferenceBasis& basis, int element, double width, const LocalParameters& params,
                const FluxLinearization* linearization = nullptr);

  int element() const { return element_; }
  int size() const { return static_cast<int>(jacobian_.rows()); }
  int basis_size() const { return n_; }
  double width() const { return width_; }

  /// Jacobian blocks at the linearization point (A_loc and B_loc).
  const Eigen::MatrixXd& interior() const { return jacobian_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 5>& trace_coupling() const { return trace_jacobian_; }
  const Eigen::PartialPivLU<Eigen::MatrixXd>& factorization() const { return lu_; }

  /// Linear part (A_lin, B_lin): excludes flux terms except the frozen tau_F penalty.
  const Eigen::MatrixXd& linear_interior() const { return linear_; }
  const Eigen::Matrix<double, Eigen::Dynamic, 5>& linear_trace_coupling() const { return linear_traces_; }

  /// Full residual R(x, t); uses the flux of the linearization if any.
  Eigen::VectorXd residual(const ElementState& x, const TraceInputs& t, const Eigen::VectorXd& load) const;

  /// A^{-1} v.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const { return lu_.solve(v); }

  /// Face values of the derived traces, including the flux F(u_hat) in F-hat.
  FaceData face_data(const ElementState& x, const TraceInputs& t) const;

  /// Linearized face rows (Jacobian of face_data at the linearization point).
  const AffineTrace& face_row(FaceQuantity f) const { return face_rows_[static_cast<int>(f)]; }

  /// Element load (f, psi_i) for every basis function.
  static Eigen::VectorXd load_vector(const ReferenceBasis& basis, const Mesh& mesh, int element,
                                     const std::function<double(double)>& f);

 private:
  const ReferenceBasis* basis_;
  int element_;
  int n_;
  double width_;
  LocalParameters params_;
  const Flux* flux_ = nullptr;
  double tau_F_left_ = 0.0;
  double tau_F_right_ = 0.0;

  Eigen::MatrixXd linear_;
  Eigen::Matrix<double, Eigen::Dynamic, 5> linear_traces_;
  Eigen::MatrixXd jacobian_;
  Eigen::Matrix<double, Eigen::Dynamic, 5> trace_jacobian_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::array<AffineTrace, kFaceQuantities> linear_face_;  // without F(u_hat)
  std::array<AffineTrace, kFaceQuantities> face_rows_;
};

/// Builds and factorizes the local operator of element i (1-based). Throws
/// CondensationError naming the element when the local matrix is singular.
LocalOperator build_local_operator(const Mesh& mesh, int element, const ReferenceBasis& basis,
                                   const StabilizationConfig& cfg, double gamma, double alpha, double beta,
                                   const FluxLinearization* linearization = nullptr);

/// x = A^{-1} (load - B t) for an affine operator.
ElementState solve_local(const LocalOperator& op, const TraceInputs& traces, const Eigen::VectorXd& load);

FaceData extract_face_data(const LocalOperator& op, const ElementState& state, const TraceInputs& traces);

/// Residual of the first four (flux-free) local equations; these are the
/// compatibility relations between u_h, the traces and (q, p, r, s).
Eigen::VectorXd compatibility_residual(const LocalOperator& op, const ElementState& x, const TraceInputs& t);

}  // namespace hdg5
