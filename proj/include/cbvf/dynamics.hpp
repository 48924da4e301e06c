#pragma once

#include <array>

#include "cbvf/common.hpp"

namespace cbvf {

enum class DynamicsKind { DoubleIntegrator, AirTaxi };

// State layout per kind:
//   DoubleIntegrator: (x, y, vx, vy)        [m, m, m/s, m/s]
//   AirTaxi:          (x, y, theta, v)      [m, m, rad, m/s], theta in (-pi, pi]
using StateVec = std::array<double, 4>;

// Action layout per kind:
//   DoubleIntegrator: (ax, ay)              [m/s^2]
//   AirTaxi:          (omega, accel)        [rad/s, m/s^2]
using ActionVec = std::array<double, 2>;

// Relative state layout per kind:
//   DoubleIntegrator: (x_rel, y_rel, vx_rel, vy_rel), world frame, s_j - s_i
//   AirTaxi:          (x_rel, y_rel, theta_rel, v_i, v_j), agent i's body frame,
//                     x axis along agent i's heading, theta_rel = theta_j - theta_i
using RelVec = std::array<double, 5>;

struct AgentState {
  StateVec q{};
};

struct ActionBounds {
  ActionVec lo{};
  ActionVec hi{};

  static ActionBounds defaults(DynamicsKind kind) {
    if (kind == DynamicsKind::AirTaxi) return {{-0.1, -1.0}, {0.1, 2.0}};
    return {{-0.5, -0.5}, {0.5, 0.5}};
  }

  ActionVec clamp_action(const ActionVec& a) const {
    return {clamp(a[0], lo[0], hi[0]), clamp(a[1], lo[1], hi[1])};
  }
};

// Speed limits enforced by the integrator. The double integrator clamps each
// velocity component to [v_min, v_max]; the air taxi clamps its scalar speed.
struct VehicleLimits {
  double v_min = 0.0;
  double v_max = 0.0;
  double v_nominal = 0.0;

  static VehicleLimits defaults(DynamicsKind kind) {
    if (kind == DynamicsKind::AirTaxi) return {30.9, 90.0, 57.0};
    return {-1.0, 1.0, 0.5};
  }
};

int state_dim(DynamicsKind kind);
int action_dim(DynamicsKind kind);
int rel_dim(DynamicsKind kind);

Vec2 position(const AgentState& s);
Vec2 velocity(const AgentState& s, DynamicsKind kind);
double heading(const AgentState& s, DynamicsKind kind);  // DI: velocity heading
double speed(const AgentState& s, DynamicsKind kind);

RelVec relative_state(const AgentState& s_i, const AgentState& s_j, DynamicsKind kind);

// Inverse of relative_state for the second argument: recovers s_j from
// (s_i, s_rel).
AgentState reconstruct_other(const AgentState& s_i, const RelVec& s_rel, DynamicsKind kind);

double rel_distance(const RelVec& s_rel);

// The relative flow is affine in both actions:
//   f(s, a_i, a_j) = drift(s) + sum_k a_i[k] * gi[k] + sum_k a_j[k] * gj[k].
struct FlowDecomposition {
  RelVec drift{};
  std::array<RelVec, 2> gi{};
  std::array<RelVec, 2> gj{};
};

FlowDecomposition flow_decomposition(const RelVec& s_rel, DynamicsKind kind);

RelVec relative_flow(const RelVec& s_rel, const ActionVec& a_i, const ActionVec& a_j,
                     DynamicsKind kind);

// RK4 step with zero-order-hold action; applies the speed clamp afterwards and
// normalizes the air-taxi heading into (-pi, pi].
AgentState step(const AgentState& s, const ActionVec& a, double dt, DynamicsKind kind,
                const VehicleLimits& limits);

}  // namespace cbvf
