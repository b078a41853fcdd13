#include "hdg5/local_element.hpp"

#include <cmath>

#include "hdg5/errors.hpp"

namespace hdg5 {

namespace {

using namespace trace;

AffineTrace make_trace(int n) {
  AffineTrace a;
  a.on_state = Eigen::RowVectorXd::Zero(5 * n);
  return a;
}

// Adds coeff * (value of variable v at a face with endpoint table e) to a.
void add_state(AffineTrace& a, Var v, const Eigen::VectorXd& e, double coeff) {
  const int n = static_cast<int>(e.size());
  a.on_state.segment(index(v) * n, n) += coeff * e.transpose();
}

AffineTrace combine(double ca, const AffineTrace& a, double cb, const AffineTrace& b) {
  AffineTrace out;
  out.on_state = ca * a.on_state + cb * b.on_state;
  out.on_traces = ca * a.on_traces + cb * b.on_traces;
  return out;
}

}  // namespace

LocalOperator::LocalOperator(const ReferenceBasis& basis, int element, double width, const LocalParameters& params,
                             const FluxLinearization* lin)
    : basis_(&basis), element_(element), n_(basis.size()), width_(width), params_(params) {
  const int n = n_;
  const int dim = 5 * n;
  const auto& c = params.cfg;
  const Eigen::VectorXd& eL = basis.left_values();
  const Eigen::VectorXd& eR = basis.right_values();
  const Eigen::VectorXd mass = 0.5 * width * basis.reference_mass();
  const Eigen::MatrixXd& K = basis.weak_derivative();

  if (lin != nullptr && lin->flux != nullptr && !lin->flux->is_zero) {
    flux_ = lin->flux;
    tau_F_left_ = lin->tau_F_left;
    tau_F_right_ = lin->tau_F_right;
  }

  // Derived traces. Outward normals: n = -1 at x_{i-1}^+, n = +1 at x_i^-.
  AffineTrace p_plus = make_trace(n), r_plus = make_trace(n), s_plus = make_trace(n);
  AffineTrace p_minus = make_trace(n), r_minus = make_trace(n), s_minus = make_trace(n);

  // w^+ = w(L) - tau_wu^+ (u_hat - u(L)) - tau_wq^+ (q_hat - q(L))
  auto plus_trace = [&](AffineTrace& a, Var w, double tau_u, double tau_q) {
    add_state(a, w, eL, 1.0);
    add_state(a, Var::u, eL, tau_u);
    add_state(a, Var::q, eL, tau_q);
    a.on_traces(kULeft) -= tau_u;
    a.on_traces(kQLeft) -= tau_q;
  };
  plus_trace(p_plus, Var::p, c.tau_pu_plus, c.tau_pq_plus);
  plus_trace(r_plus, Var::r, c.tau_ru_plus, c.tau_rq_plus);
  plus_trace(s_plus, Var::s, c.tau_su_plus, c.tau_sq_plus);

  // w^- = w(R) + tau_wu^- (u_hat - u(R)) + tau_wq^- (q_hat - q(R)) + tau_wp^- (p_hat^- - p(R))
  auto minus_trace = [&](AffineTrace& a, Var w, double tau_u, double tau_q, double tau_p) {
    add_state(a, w, eR, 1.0);
    add_state(a, Var::u, eR, -tau_u);
    add_state(a, Var::q, eR, -tau_q);
    add_state(a, Var::p, eR, -tau_p);
    a.on_traces(kURight) += tau_u;
    a.on_traces(kQRight) += tau_q;
    a.on_traces(kPRight) += tau_p;
  };
  p_minus.on_traces(kPRight) = 1.0;
  minus_trace(r_minus, Var::r, c.tau_ru_minus, c.tau_rq_minus, c.tau_rp_minus);
  minus_trace(s_minus, Var::s, c.tau_su_minus, c.tau_sq_minus, c.tau_sp_minus);

  // F-hat = alpha p-hat + beta s-hat [+ F(u_hat)] - tau_F (u_hat - u_h) n
  AffineTrace flux_left = combine(params.alpha, p_plus, params.beta, s_plus);
  add_state(flux_left, Var::u, eL, -tau_F_left_);
  flux_left.on_traces(kULeft) += tau_F_left_;
  AffineTrace flux_right = combine(params.alpha, p_minus, params.beta, s_minus);
  add_state(flux_right, Var::u, eR, tau_F_right_);
  flux_right.on_traces(kURight) -= tau_F_right_;

  linear_face_ = {p_plus, r_plus, s_plus, p_minus, r_minus, s_minus, flux_left, flux_right};

  linear_ = Eigen::MatrixXd::Zero(dim, dim);
  linear_traces_ = Eigen::Matrix<double, Eigen::Dynamic, 5>::Zero(dim, 5);
  auto rows = [&](Var eq) { return index(eq) * n; };
  auto cols = [&](Var v) { return index(v) * n; };
  // rows(eq) += e * trace
  auto add_face = [&](Var eq, const Eigen::VectorXd& e, double sign, const AffineTrace& a) {
    linear_.middleRows(rows(eq), n) += sign * e * a.on_state;
    linear_traces_.middleRows(rows(eq), n) += sign * e * a.on_traces;
  };

  // (q, v) + (u, v_x) - <u_hat, v n> = 0
  linear_.block(rows(Var::u), cols(Var::q), n, n).diagonal() = mass;
  linear_.block(rows(Var::u), cols(Var::u), n, n) = K;
  linear_traces_.block(rows(Var::u), kURight, n, 1) = -eR;
  linear_traces_.block(rows(Var::u), kULeft, n, 1) = eL;
  // (p, z) + (q, z_x) - <q_hat, z n> = 0
  linear_.block(rows(Var::q), cols(Var::p), n, n).diagonal() = mass;
  linear_.block(rows(Var::q), cols(Var::q), n, n) = K;
  linear_traces_.block(rows(Var::q), kQRight, n, 1) = -eR;
  linear_traces_.block(rows(Var::q), kQLeft, n, 1) = eL;
  // (r, w) + (p, w_x) - <p_hat, w n> = 0
  linear_.block(rows(Var::p), cols(Var::r), n, n).diagonal() = mass;
  linear_.block(rows(Var::p), cols(Var::p), n, n) = K;
  add_face(Var::p, eR, -1.0, p_minus);
  add_face(Var::p, eL, 1.0, p_plus);
  // (s, phi) + (r, phi_x) - <r_hat, phi n> = 0
  linear_.block(rows(Var::r), cols(Var::s), n, n).diagonal() = mass;
  linear_.block(rows(Var::r), cols(Var::r), n, n) = K;
  add_face(Var::r, eR, -1.0, r_minus);
  add_face(Var::r, eL, 1.0, r_plus);
  // (gamma u, psi) - (alpha p + beta s + F(u), psi_x) + <F_hat, psi n> = (f, psi)
  linear_.block(rows(Var::s), cols(Var::u), n, n).diagonal() = params.gamma * mass;
  linear_.block(rows(Var::s), cols(Var::p), n, n) = -params.alpha * K;
  linear_.block(rows(Var::s), cols(Var::s), n, n) = -params.beta * K;
  add_face(Var::s, eR, 1.0, flux_right);
  add_face(Var::s, eL, -1.0, flux_left);

  jacobian_ = linear_;
  trace_jacobian_ = linear_traces_;
  face_rows_ = linear_face_;
  if (flux_ != nullptr) {
    const auto& quad = basis.quadrature();
    const Eigen::VectorXd uq = basis.values() * lin->u;
    // d/du_j of -(F(u_h), psi_i') = -sum_q w_q F'(u_q) P_j(xi_q) P_i'(xi_q)
    for (int q = 0; q < quad.size(); ++q) {
      const double w = quad.weights[q] * lin->flux->derivative(uq[q]);
      jacobian_.block(rows(Var::s), cols(Var::u), n, n) -=
          w * basis.derivatives().row(q).transpose() * basis.values().row(q);
    }
    const double dF_left = lin->flux->derivative(lin->u_hat_left);
    const double dF_right = lin->flux->derivative(lin->u_hat_right);
    trace_jacobian_.block(rows(Var::s), kURight, n, 1) += dF_right * eR;
    trace_jacobian_.block(rows(Var::s), kULeft, n, 1) -= dF_left * eL;
    face_rows_[static_cast<int>(FaceQuantity::FluxLeft)].on_traces(kULeft) += dF_left;
    face_rows_[static_cast<int>(FaceQuantity::FluxRight)].on_traces(kURight) += dF_right;
  }

  lu_.compute(jacobian_);
  const double rcond = lu_.rcond();
  if (!std::isfinite(rcond) || rcond < 1e-14)
    throw CondensationError(element, "local matrix is singular (rcond = " + std::to_string(rcond) +
                                         "); check the stabilization parameters and gamma > 0");
}

Eigen::VectorXd LocalOperator::residual(const ElementState& x, const TraceInputs& t, const Eigen::VectorXd& load) const {
  const int n = n_;
  Eigen::VectorXd r = linear_ * x + linear_traces_ * t;
  r.segment(index(Var::s) * n, n) -= load;
  if (flux_ != nullptr) {
    const auto& quad = basis_->quadrature();
    const Eigen::VectorXd uq = basis_->values() * block(x, Var::u, n);
    auto eq5 = r.segment(index(Var::s) * n, n);
    for (int q = 0; q < quad.size(); ++q)
      eq5 -= quad.weights[q] * flux_->value(uq[q]) * basis_->derivatives().row(q).transpose();
    eq5 += flux_->value(t(kURight)) * basis_->right_values();
    eq5 -= flux_->value(t(kULeft)) * basis_->left_values();
  }
  return r;
}

FaceData LocalOperator::face_data(const ElementState& x, const TraceInputs& t) const {
  FaceData out;
  for (int f = 0; f < kFaceQuantities; ++f) out.values[f] = linear_face_[f](x, t);
  if (flux_ != nullptr) {
    out.values[static_cast<int>(FaceQuantity::FluxLeft)] += flux_->value(t(kULeft));
    out.values[static_cast<int>(FaceQuantity::FluxRight)] += flux_->value(t(kURight));
  }
  return out;
}

Eigen::VectorXd LocalOperator::load_vector(const ReferenceBasis& basis, const Mesh& mesh, int element,
                                           const std::function<double(double)>& f) {
  const auto& quad = basis.quadrature();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.size());
  for (int q = 0; q < quad.size(); ++q)
    out += quad.weights[q] * f(to_physical(mesh, element, quad.nodes[q])) * basis.values().row(q).transpose();
  return 0.5 * mesh.width(element) * out;
}

LocalOperator build_local_operator(const Mesh& mesh, int element, const ReferenceBasis& basis,
                                   const StabilizationConfig& cfg, double gamma, double alpha, double beta,
                                   const FluxLinearization* linearization) {
  LocalParameters params{gamma, alpha, beta, cfg};
  return LocalOperator(basis, element, mesh.width(element), params, linearization);
}

ElementState solve_local(const LocalOperator& op, const TraceInputs& traces, const Eigen::VectorXd& load) {
  Eigen::VectorXd rhs = -op.trace_coupling() * traces;
  const int n = op.basis_size();
  rhs.segment(index(Var::s) * n, n) += load;
  return op.apply_inverse(rhs);
}

FaceData extract_face_data(const LocalOperator& op, const ElementState& state, const TraceInputs& traces) {
  return op.face_data(state, traces);
}

Eigen::VectorXd compatibility_residual(const LocalOperator& op, const ElementState& x, const TraceInputs& t) {
  const int n = op.basis_size();
  return (op.linear_interior() * x + op.linear_trace_coupling() * t).head(4 * n);
}

}  // namespace hdg5
