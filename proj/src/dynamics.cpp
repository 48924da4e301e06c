#include "cbvf/dynamics.hpp"

#include <cmath>

namespace cbvf {

int state_dim(DynamicsKind) { return 4; }
int action_dim(DynamicsKind) { return 2; }
int rel_dim(DynamicsKind kind) { return kind == DynamicsKind::AirTaxi ? 5 : 4; }

Vec2 position(const AgentState& s) { return {s.q[0], s.q[1]}; }

Vec2 velocity(const AgentState& s, DynamicsKind kind) {
  if (kind == DynamicsKind::AirTaxi) {
    return {s.q[3] * std::cos(s.q[2]), s.q[3] * std::sin(s.q[2])};
  }
  return {s.q[2], s.q[3]};
}

double heading(const AgentState& s, DynamicsKind kind) {
  if (kind == DynamicsKind::AirTaxi) return s.q[2];
  return std::atan2(s.q[3], s.q[2]);
}

double speed(const AgentState& s, DynamicsKind kind) {
  if (kind == DynamicsKind::AirTaxi) return s.q[3];
  return std::hypot(s.q[2], s.q[3]);
}

RelVec relative_state(const AgentState& s_i, const AgentState& s_j, DynamicsKind kind) {
  RelVec r{};
  const double dx = s_j.q[0] - s_i.q[0];
  const double dy = s_j.q[1] - s_i.q[1];
  if (kind == DynamicsKind::AirTaxi) {
    // Displacement rotated into agent i's body frame (x axis along its
    // heading). Using the ego heading for the rotation keeps the relative
    // dynamics autonomous; theta_rel = theta_j - theta_i matches the flow's
    // theta_rel-dot = omega_j - omega_i.
    const double c = std::cos(s_i.q[2]);
    const double sn = std::sin(s_i.q[2]);
    r[0] = c * dx + sn * dy;
    r[1] = -sn * dx + c * dy;
    r[2] = wrap_angle(s_j.q[2] - s_i.q[2]);
    r[3] = s_i.q[3];
    r[4] = s_j.q[3];
  } else {
    r[0] = dx;
    r[1] = dy;
    r[2] = s_j.q[2] - s_i.q[2];
    r[3] = s_j.q[3] - s_i.q[3];
  }
  return r;
}

AgentState reconstruct_other(const AgentState& s_i, const RelVec& s_rel, DynamicsKind kind) {
  AgentState s_j;
  if (kind == DynamicsKind::AirTaxi) {
    const double c = std::cos(s_i.q[2]);
    const double sn = std::sin(s_i.q[2]);
    s_j.q[0] = s_i.q[0] + c * s_rel[0] - sn * s_rel[1];
    s_j.q[1] = s_i.q[1] + sn * s_rel[0] + c * s_rel[1];
    s_j.q[2] = wrap_angle(s_i.q[2] + s_rel[2]);
    s_j.q[3] = s_rel[4];
  } else {
    s_j.q[0] = s_i.q[0] + s_rel[0];
    s_j.q[1] = s_i.q[1] + s_rel[1];
    s_j.q[2] = s_i.q[2] + s_rel[2];
    s_j.q[3] = s_i.q[3] + s_rel[3];
  }
  return s_j;
}

double rel_distance(const RelVec& s_rel) { return std::hypot(s_rel[0], s_rel[1]); }

FlowDecomposition flow_decomposition(const RelVec& s, DynamicsKind kind) {
  FlowDecomposition d;
  if (kind == DynamicsKind::AirTaxi) {
    const double x = s[0], y = s[1], th = s[2], vi = s[3], vj = s[4];
    d.drift = {-vi + vj * std::cos(th), vj * std::sin(th), 0.0, 0.0, 0.0};
    d.gi[0] = {y, -x, -1.0, 0.0, 0.0};  // omega_i
    d.gi[1] = {0.0, 0.0, 0.0, 1.0, 0.0};  // accel_i
    d.gj[0] = {0.0, 0.0, 1.0, 0.0, 0.0};  // omega_j
    d.gj[1] = {0.0, 0.0, 0.0, 0.0, 1.0};  // accel_j
  } else {
    d.drift = {s[2], s[3], 0.0, 0.0, 0.0};
    d.gi[0] = {0.0, 0.0, -1.0, 0.0, 0.0};  // ax_i
    d.gi[1] = {0.0, 0.0, 0.0, -1.0, 0.0};  // ay_i
    d.gj[0] = {0.0, 0.0, 1.0, 0.0, 0.0};   // ax_j
    d.gj[1] = {0.0, 0.0, 0.0, 1.0, 0.0};   // ay_j
  }
  return d;
}

RelVec relative_flow(const RelVec& s_rel, const ActionVec& a_i, const ActionVec& a_j,
                     DynamicsKind kind) {
  const FlowDecomposition d = flow_decomposition(s_rel, kind);
  RelVec f{};
  for (int k = 0; k < 5; ++k) {
    f[k] = d.drift[k] + a_i[0] * d.gi[0][k] + a_i[1] * d.gi[1][k] + a_j[0] * d.gj[0][k] +
           a_j[1] * d.gj[1][k];
  }
  return f;
}

namespace {

StateVec agent_flow(const StateVec& q, const ActionVec& a, DynamicsKind kind) {
  if (kind == DynamicsKind::AirTaxi) {
    return {q[3] * std::cos(q[2]), q[3] * std::sin(q[2]), a[0], a[1]};
  }
  return {q[2], q[3], a[0], a[1]};
}

}  // namespace

AgentState step(const AgentState& s, const ActionVec& a, double dt, DynamicsKind kind,
                const VehicleLimits& limits) {
  const StateVec k1 = agent_flow(s.q, a, kind);
  StateVec q2;
  for (int i = 0; i < 4; ++i) q2[i] = s.q[i] + 0.5 * dt * k1[i];
  const StateVec k2 = agent_flow(q2, a, kind);
  StateVec q3;
  for (int i = 0; i < 4; ++i) q3[i] = s.q[i] + 0.5 * dt * k2[i];
  const StateVec k3 = agent_flow(q3, a, kind);
  StateVec q4;
  for (int i = 0; i < 4; ++i) q4[i] = s.q[i] + dt * k3[i];
  const StateVec k4 = agent_flow(q4, a, kind);

  AgentState out;
  for (int i = 0; i < 4; ++i) {
    out.q[i] = s.q[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  if (kind == DynamicsKind::AirTaxi) {
    out.q[2] = wrap_angle(out.q[2]);
    out.q[3] = clamp(out.q[3], limits.v_min, limits.v_max);
  } else {
    out.q[2] = clamp(out.q[2], limits.v_min, limits.v_max);
    out.q[3] = clamp(out.q[3], limits.v_min, limits.v_max);
  }
  return out;
}

}  // namespace cbvf
