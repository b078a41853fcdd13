#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hdg5/basis.hpp"
#include "hdg5/local_element.hpp"
#include "hdg5/mesh.hpp"
#include "hdg5/problem.hpp"
#include "hdg5/stabilization.hpp"

namespace hdg5 {

/// Globally coupled unknowns: u-hat and q-hat at the nodes, p-hat^- at the
/// right face of every element. In the periodic case node N is node 0 and only
/// N node values are stored.
struct TraceVector {
  Eigen::VectorXd u_hat;
  Eigen::VectorXd q_hat;
  Eigen::VectorXd p_hat_minus;  ///< entry i-1 belongs to element i

  static TraceVector zeros(const Mesh& mesh);

  int node_slot(int node) const { return node % static_cast<int>(u_hat.size()); }
  double u_at(int node) const { return u_hat[node_slot(node)]; }
  double q_at(int node) const { return q_hat[node_slot(node)]; }
  TraceInputs element_inputs(int element) const;
  double max_abs() const;
};

TraceVector operator+(const TraceVector& a, const TraceVector& b);
TraceVector operator-(const TraceVector& a, const TraceVector& b);
TraceVector operator*(double c, const TraceVector& a);

/// Values of the five fixed traces of a Dirichlet problem.
struct BoundaryValues {
  double u_left = 0.0, u_right = 0.0, q_left = 0.0, q_right = 0.0, p_right = 0.0;
};

BoundaryValues boundary_values_at(const DirichletData& data, double t);

/// Linear(ized) transmission system for the trace unknowns, ordered node by
/// node as (u-hat, q-hat, p-hat^-). Row 3(m-1)+c is the jump of p-hat (c=0),
/// r-hat (c=1) or F-hat (c=2) at node x_m.
struct GlobalSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  bool periodic = true;

  int dimension() const { return static_cast<int>(rhs.size()); }
  int blocks() const { return dimension() / 3; }
  /// Lower/upper bandwidth ignoring the periodic corner blocks.
  std::pair<int, int> bandwidth() const;
};

/// Banded LU for the Dirichlet chain; bordered elimination of the last node
/// block for the periodic wrap.
Eigen::VectorXd solve_global(const GlobalSystem& system);

struct StationaryOptions {
  int max_iterations = 25;
  double tolerance = 1e-12;
  int max_halvings = 5;
  /// Share one factorization between elements of a uniform mesh (linear flux only).
  bool cache_uniform = true;
  /// gamma < 0 is only meaningful for running the midpoint step backwards.
  bool allow_negative_gamma = false;
};

struct StationaryResult {
  SolutionField field;
  TraceVector traces;
  int iterations = 0;
  std::vector<double> residual_history;  ///< nonlinear residual before each step and at the end
};

/// Solves (gamma u + D(u), psi) = (f_tilde, psi) in HDG form on a fixed mesh.
/// Holds the element operators for the linear part so that repeated solves
/// with the same gamma (time stepping) reuse the factorizations.
class StationarySolver {
 public:
  StationarySolver(const ProblemSpec& problem, const Mesh& mesh, const ReferenceBasis& basis,
                   const StabilizationConfig& cfg, double gamma, StationaryOptions options = {});

  const Mesh& mesh() const { return *mesh_; }
  const ReferenceBasis& basis() const { return *basis_; }
  double gamma() const { return gamma_; }
  bool nonlinear() const { return !problem_->flux.is_zero; }

  /// load(:, e-1) = (f_tilde, psi_i) on element e. For Dirichlet problems
  /// `boundary` supplies the fixed traces. `guess` seeds Newton; without it a
  /// nonlinear solve starts from the solution of the flux-free problem.
  StationaryResult solve(const ModalField& load, const BoundaryValues& boundary = {},
                         const StationaryResult* guess = nullptr) const;

  /// Newton linearization of the transmission conditions at (state, traces).
  /// At the zero state of a linear problem this is the condensed global system.
  GlobalSystem assemble(const SolutionField& state, const TraceVector& traces, const ModalField& load) const;

  struct StepReport {
    double residual_before = 0.0;
    double residual_after = 0.0;
    double trace_increment = 0.0;
    double state_increment = 0.0;
    int halvings = 0;
  };
  /// One damped Newton step on the condensed system; updates state and traces.
  StepReport newton_step(SolutionField& state, TraceVector& traces, const ModalField& load) const;

  /// max over nodes of |[[p-hat]]|, |[[r-hat]]|, |[[F-hat]]|.
  double transmission_residual(const SolutionField& state, const TraceVector& traces) const;
  /// max over elements of |R_e|_inf / (|load| + |A_lin||x| + |B_lin||t|)_inf.
  double local_residual(const SolutionField& state, const TraceVector& traces, const ModalField& load) const;
  /// Nonlinear residual: max of all local residual entries and jumps.
  double residual_norm(const SolutionField& state, const TraceVector& traces, const ModalField& load) const;

  /// Element operator linearized about the given state (the cached linear one
  /// for F = 0).
  std::shared_ptr<const LocalOperator> element_operator(int element, const SolutionField& state,
                                                        const TraceVector& traces, bool drop_flux = false) const;

 private:
  std::vector<std::shared_ptr<const LocalOperator>> operators(const SolutionField& state, const TraceVector& traces,
                                                              bool drop_flux) const;
  GlobalSystem assemble_with(const std::vector<std::shared_ptr<const LocalOperator>>& ops, const SolutionField& state,
                             const TraceVector& traces, const ModalField& load,
                             std::vector<Eigen::VectorXd>* local_shift,
                             std::vector<Eigen::Matrix<double, Eigen::Dynamic, 5>>* local_sensitivity) const;
  double residual_with(const std::vector<std::shared_ptr<const LocalOperator>>& ops, const SolutionField& state,
                       const TraceVector& traces, const ModalField& load) const;
  double jump_residual_with(const std::vector<std::shared_ptr<const LocalOperator>>& ops, const SolutionField& state,
                            const TraceVector& traces) const;
  StepReport step_with(std::vector<std::shared_ptr<const LocalOperator>>& ops, SolutionField& state,
                       TraceVector& traces, const ModalField& load, bool drop_flux) const;

  const ProblemSpec* problem_;
  const Mesh* mesh_;
  const ReferenceBasis* basis_;
  StabilizationConfig cfg_;
  double gamma_;
  StationaryOptions options_;
  std::vector<std::shared_ptr<const LocalOperator>> linear_ops_;
};

ElementState element_state(const SolutionField& field, int element);
void set_element_state(SolutionField& field, int element, const ElementState& x);

/// Load vectors (f, psi) for all elements.
ModalField load_from_function(const std::function<double(double)>& f, const Mesh& mesh, const ReferenceBasis& basis);
/// (c * w_h, psi) for a discrete field w_h.
ModalField mass_times(const ModalField& field, const Mesh& mesh, double c);

/// Convenience wrapper: one stationary solve with forcing f_tilde.
StationaryResult solve_stationary(const ProblemSpec& problem, const Mesh& mesh, const ReferenceBasis& basis,
                                  const StabilizationConfig& cfg, double gamma,
                                  const std::function<double(double)>& f_tilde, const BoundaryValues& boundary = {});

}  // namespace hdg5
