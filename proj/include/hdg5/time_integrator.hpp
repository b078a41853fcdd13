#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hdg5/global_hdg.hpp"

namespace hdg5 {

/// 0 = t_0 < t_1 < ... < t_M = T.
struct TimeGrid {
  std::vector<double> times;

  /// Steps of size dt; the last one is shortened if dt does not divide T.
  static TimeGrid uniform(double final_time, double dt);
  int steps() const { return static_cast<int>(times.size()) - 1; }
  double step_size(int j) const { return times[j + 1] - times[j]; }
};

struct TimeState {
  int level = 0;
  double time = 0.0;
  SolutionField field;
  TraceVector traces;
};

/// Step size used by the convergence studies: 0.1 h for k <= 1, 0.1 h^2 otherwise.
double paper_time_step(int degree, double h);

/// Implicit midpoint rule where every step is one stationary HDG solve:
/// u^{j,1} solves (u^{j,1} - u^j) / (dt/2) + D(u^{j,1}) = f(t_j + dt/2), and
/// u^{j+1} = 2 u^{j,1} - u^j (likewise for q, p, r, s and the traces).
class MidpointIntegrator {
 public:
  MidpointIntegrator(const ProblemSpec& problem, const Mesh& mesh, const ReferenceBasis& basis,
                     const StabilizationConfig& cfg, StationaryOptions options = {});

  /// Stationary solve with gamma = 1 and f_tilde = D(u_0) + u_0.
  TimeState initialize();
  TimeState step(const TimeState& state, double dt);
  /// Solves the step equation with dt replaced by -dt (runs the rule backwards).
  TimeState step_backward(const TimeState& state, double dt);

  using Observer = std::function<void(const TimeState&)>;
  /// Initializes and marches to final_time; the observer sees every level including t = 0.
  TimeState run(double final_time, double dt, const Observer& observer = {});

  /// Called after every stationary solve (initial and per step) with the
  /// solver, its result and the load it was given.
  using SolveObserver =
      std::function<void(const StationarySolver&, const StationaryResult&, const ModalField& load)>;
  void set_solve_observer(SolveObserver observer) { solve_observer_ = std::move(observer); }

  /// Largest Newton iteration count seen in any stationary solve so far.
  int max_newton_iterations() const { return max_iterations_; }

 private:
  TimeState advance(const TimeState& state, double gamma, double t_next);
  const StationarySolver& solver_for(double gamma);

  const ProblemSpec* problem_;
  const Mesh* mesh_;
  const ReferenceBasis* basis_;
  StabilizationConfig cfg_;
  StationaryOptions options_;
  std::unique_ptr<StationarySolver> solver_;
  int max_iterations_ = 0;
  SolveObserver solve_observer_;
};

}  // namespace hdg5
