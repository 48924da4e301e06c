#pragma once

#include "cbvf/dynamics.hpp"
#include "cbvf/grid.hpp"

namespace cbvf {

enum class Dissipation { GlobalLaxFriedrichs };

struct SolveSettings {
  double cfl = 0.5;
  double convergence_tol = 1e-3;  // value units; callers scale by r_safety
  int max_iters = 4000;
  Dissipation dissipation = Dissipation::GlobalLaxFriedrichs;
  unsigned jobs = 0;  // 0 -> hardware concurrency
};

SolveSettings default_solve_settings(DynamicsKind kind);

// Infinite-horizon closest-approach value for a pair of agents, both steering
// to keep the pair apart. Marches the variational inequality
//   d/dtau V = min{0, H}, V(., 0) = dist, H = max over both actions of grad V . f
// with a first-order upwind scheme under global Lax-Friedrichs dissipation
// until the max-norm update drops below convergence_tol.
ValueField solve_cooperative_value(DynamicsKind kind, const ActionBounds& bounds_i,
                                   const ActionBounds& bounds_j, const GridSpec& grid,
                                   const SolveSettings& settings);

// Game value with the opponent (agent j) driving toward collision while the
// ego evades: H = min over a_j of max over a_i. The flows are control-affine
// with decoupled inputs, so both orders coincide and the extremization is
// exact per action component.
ValueField solve_worstcase_value(DynamicsKind kind, const ActionBounds& bounds_i,
                                 const ActionBounds& bounds_j, const GridSpec& grid,
                                 const SolveSettings& settings);

// Waypoint acceptance box in the waypoint frame (+x = approach direction).
struct WaypointTarget {
  double dist_threshold = 300.0;
  double heading_threshold = kPi / 4.0;
  double speed_threshold = 20.0;
  double desired_speed = 57.0;
};

// Minimum time for the air-taxi dynamics to enter the waypoint target box,
// solved on a (x, y, theta, v) grid in the waypoint frame. Nodes that never
// reach the target hold kUnreachable.
ValueField solve_time_to_reach(const WaypointTarget& target, const ActionBounds& bounds,
                               const VehicleLimits& limits, const GridSpec& grid,
                               const SolveSettings& settings);

// Reduced models exercised by the test suite against closed-form solutions.
// Toy single integrator: state (x_rel, y_rel), flow u_j - u_i, per-component
// |u| bounds. Toy double integrator: state (x_rel, v_rel), flow (v, a_j - a_i).
ValueField solve_toy_single_integrator(double u_max_i, double u_max_j, const GridSpec& grid,
                                       FieldKind game, const SolveSettings& settings);
ValueField solve_toy_double_integrator_1d(double a_max_i, double a_max_j, const GridSpec& grid,
                                          FieldKind game, const SolveSettings& settings);

}  // namespace cbvf
