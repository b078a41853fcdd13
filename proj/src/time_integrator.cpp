#include "hdg5/time_integrator.hpp"

#include <cmath>
#include <stdexcept>

#include "hdg5/errors.hpp"

namespace hdg5 {

TimeGrid TimeGrid::uniform(double final_time, double dt) {
  if (!(final_time > 0.0) || !(dt > 0.0)) throw std::invalid_argument("TimeGrid: T and dt must be positive");
  TimeGrid g;
  g.times.push_back(0.0);
  // Steps that land within rounding of T are not followed by a sliver step.
  const double slack = 1e-10 * dt;
  int j = 1;
  while (j * dt < final_time - slack) {
    g.times.push_back(j * dt);
    ++j;
  }
  g.times.push_back(final_time);
  return g;
}

double paper_time_step(int degree, double h) { return degree <= 1 ? 0.1 * h : 0.1 * h * h; }

MidpointIntegrator::MidpointIntegrator(const ProblemSpec& problem, const Mesh& mesh, const ReferenceBasis& basis,
                                       const StabilizationConfig& cfg, StationaryOptions options)
    : problem_(&problem), mesh_(&mesh), basis_(&basis), cfg_(cfg), options_(options) {
  problem.validate();
}

const StationarySolver& MidpointIntegrator::solver_for(double gamma) {
  if (!solver_ || solver_->gamma() != gamma) {
    StationaryOptions opts = options_;
    opts.allow_negative_gamma = gamma < 0.0;
    solver_ = std::make_unique<StationarySolver>(*problem_, *mesh_, *basis_, cfg_, gamma, opts);
  }
  return *solver_;
}

TimeState MidpointIntegrator::initialize() {
  const ProblemSpec& p = *problem_;
  const StationarySolver& solver = solver_for(1.0);
  const auto f_tilde = [&p](double x) { return p.initial_operator(x) + p.initial(x); };
  BoundaryValues bc;
  if (p.dirichlet) bc = boundary_values_at(*p.dirichlet, 0.0);
  const ModalField load = load_from_function(f_tilde, *mesh_, *basis_);
  StationaryResult r = solver.solve(load, bc);
  if (solve_observer_) solve_observer_(solver, r, load);
  max_iterations_ = std::max(max_iterations_, r.iterations);
  return TimeState{0, 0.0, std::move(r.field), std::move(r.traces)};
}

TimeState MidpointIntegrator::advance(const TimeState& state, double gamma, double t_next) {
  const ProblemSpec& p = *problem_;
  const StationarySolver& solver = solver_for(gamma);
  const double t_mid = 0.5 * (state.time + t_next);
  ModalField load = load_from_function([&p, t_mid](double x) { return p.forcing(x, t_mid); }, *mesh_, *basis_);
  load += mass_times(state.field[Var::u], *mesh_, gamma);
  BoundaryValues bc;
  if (p.dirichlet) {
    // Average of the two levels, so that the extrapolated traces hit g(t_{j+1}).
    const BoundaryValues a = boundary_values_at(*p.dirichlet, state.time);
    const BoundaryValues b = boundary_values_at(*p.dirichlet, t_next);
    bc = {0.5 * (a.u_left + b.u_left), 0.5 * (a.u_right + b.u_right), 0.5 * (a.q_left + b.q_left),
          0.5 * (a.q_right + b.q_right), 0.5 * (a.p_right + b.p_right)};
  }
  // Seeding with level j makes the first sweep solve for the increment, so
  // roundoff scales with |u^{j,1} - u^j| instead of |u^j|. Without it the
  // extrapolated s field accumulates h^-4-amplified noise over many steps.
  StationaryResult guess;
  guess.field = state.field;
  guess.traces = state.traces;
  StationaryResult mid = solver.solve(load, bc, &guess);
  if (solve_observer_) solve_observer_(solver, mid, load);
  max_iterations_ = std::max(max_iterations_, mid.iterations);
  TimeState next;
  next.level = state.level + 1;
  next.time = t_next;
  next.field = 2.0 * mid.field - state.field;
  next.traces = 2.0 * mid.traces - state.traces;
  return next;
}

TimeState MidpointIntegrator::step(const TimeState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("MidpointIntegrator::step: dt must be positive");
  return advance(state, 2.0 / dt, state.time + dt);
}

TimeState MidpointIntegrator::step_backward(const TimeState& state, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("MidpointIntegrator::step_backward: dt must be positive");
  TimeState back = advance(state, -2.0 / dt, state.time - dt);
  back.level = state.level - 1;
  return back;
}

TimeState MidpointIntegrator::run(double final_time, double dt, const Observer& observer) {
  const TimeGrid grid = TimeGrid::uniform(final_time, dt);
  TimeState state = initialize();
  if (observer) observer(state);
  for (int j = 0; j < grid.steps(); ++j) {
    state = step(state, grid.step_size(j));
    state.time = grid.times[j + 1];
    if (observer) observer(state);
  }
  return state;
}

}  // namespace hdg5
