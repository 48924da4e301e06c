#include "cbvf/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace cbvf {

double barrier_value(const Barrier& b, const RelVec& s_rel) {
  return interpolate(*b.field, s_rel) - b.r_safety;
}

double barrier_value_clamped(const Barrier& b, const RelVec& s_rel) {
  return interpolate_clamped(*b.field, s_rel) - b.r_safety;
}

BarrierConstraint linearize_barrier_constraint(const Barrier& b, const RelVec& s_rel,
                                               DynamicsKind kind) {
  const auto grad = gradient(*b.field, s_rel);
  const FlowDecomposition f = flow_decomposition(s_rel, kind);
  const int nd = rel_dim(kind);

  auto dot = [&](const RelVec& v) {
    double acc = 0.0;
    for (int k = 0; k < nd; ++k) acc += grad[k] * v[k];
    return acc;
  };

  BarrierConstraint c;
  c.c0 = dot(f.drift) + b.gamma * barrier_value(b, s_rel);
  c.gi = {dot(f.gi[0]), dot(f.gi[1])};
  c.gj = {dot(f.gj[0]), dot(f.gj[1])};
  return c;
}

double barrier_constraint_lhs(const Barrier& b, const RelVec& s_rel, const ActionVec& a_i,
                              const ActionVec& a_j, DynamicsKind kind) {
  const BarrierConstraint c = linearize_barrier_constraint(b, s_rel, kind);
  return c.c0 + c.gi[0] * a_i[0] + c.gi[1] * a_i[1] + c.gj[0] * a_j[0] + c.gj[1] * a_j[1];
}

namespace {

struct BoxQp {
  int dims = 0;
  double c0 = 0.0;
  std::array<double, 4> nom{}, g{}, lo{}, hi{};

  double phi(double mu) const {
    double acc = c0;
    for (int k = 0; k < dims; ++k) acc += g[k] * clamp(nom[k] + mu * g[k], lo[k], hi[k]);
    return acc;
  }

  std::array<double, 4> at(double mu) const {
    std::array<double, 4> a{};
    for (int k = 0; k < dims; ++k) a[k] = clamp(nom[k] + mu * g[k], lo[k], hi[k]);
    return a;
  }
};

struct BoxQpSolution {
  std::array<double, 4> a{};
  bool active = false;
  bool feasible = true;
  double constraint_value = 0.0;
  double multiplier = 0.0;
};

BoxQpSolution solve_box_qp(const BoxQp& qp) {
  BoxQpSolution sol;

  const double phi0 = qp.phi(0.0);
  if (phi0 >= 0.0) {
    for (int k = 0; k < qp.dims; ++k) sol.a[k] = qp.nom[k];
    sol.constraint_value = phi0;
    return sol;
  }
  sol.active = true;

  // Multiplier value past which every influenced component is saturated.
  double mu_sat = 0.0;
  bool any_coeff = false;
  for (int k = 0; k < qp.dims; ++k) {
    if (qp.g[k] == 0.0) continue;
    any_coeff = true;
    const double edge = qp.g[k] > 0.0 ? qp.hi[k] : qp.lo[k];
    mu_sat = std::max(mu_sat, (edge - qp.nom[k]) / qp.g[k]);
  }
  if (!any_coeff) {
    for (int k = 0; k < qp.dims; ++k) sol.a[k] = qp.nom[k];
    sol.feasible = false;
    sol.constraint_value = phi0;
    return sol;
  }

  const double phi_sat = qp.phi(mu_sat);
  if (phi_sat < 0.0) {
    sol.a = qp.at(mu_sat + 1.0);  // fully saturated: the lhs-maximizing action
    sol.feasible = false;
    sol.constraint_value = phi_sat;
    sol.multiplier = 2.0 * mu_sat;
    return sol;
  }

  // phi is nondecreasing in mu; bisect keeping phi(hi) >= 0 > phi(lo).
  double lo = 0.0, hi = mu_sat;
  double phi_lo = phi0, phi_hi = phi_sat;
  const double resolution = 1e-10 * std::max(1.0, mu_sat);
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    const double phi_mid = qp.phi(mid);
    if (phi_mid < phi_lo - 1e-9 || phi_mid > phi_hi + 1e-9) {
      throw std::logic_error("barrier constraint not monotone in the multiplier");
    }
    if (phi_mid >= 0.0) {
      hi = mid;
      phi_hi = phi_mid;
    } else {
      lo = mid;
      phi_lo = phi_mid;
    }
  }

  sol.a = qp.at(hi);
  sol.constraint_value = qp.phi(hi);
  sol.multiplier = 2.0 * hi;
  return sol;
}

}  // namespace

FilterOutcome filter_cooperative(const Barrier& b, const RelVec& s_rel, const ActionVec& a_i_nom,
                                 const ActionVec& a_j_nom, const ActionBounds& bounds_i,
                                 const ActionBounds& bounds_j, DynamicsKind kind) {
  const BarrierConstraint c = linearize_barrier_constraint(b, s_rel, kind);

  BoxQp qp;
  qp.dims = 4;
  qp.c0 = c.c0;
  qp.nom = {a_i_nom[0], a_i_nom[1], a_j_nom[0], a_j_nom[1]};
  qp.g = {c.gi[0], c.gi[1], c.gj[0], c.gj[1]};
  qp.lo = {bounds_i.lo[0], bounds_i.lo[1], bounds_j.lo[0], bounds_j.lo[1]};
  qp.hi = {bounds_i.hi[0], bounds_i.hi[1], bounds_j.hi[0], bounds_j.hi[1]};

  const BoxQpSolution sol = solve_box_qp(qp);
  FilterOutcome out;
  out.a_i = {sol.a[0], sol.a[1]};
  out.a_j = {sol.a[2], sol.a[3]};
  out.has_a_j = true;
  out.active = sol.active;
  out.feasible = sol.feasible;
  out.constraint_value = sol.constraint_value;
  out.multiplier = sol.multiplier;
  return out;
}

FilterOutcome filter_noncooperative(const Barrier& b, const RelVec& s_rel,
                                    const ActionVec& a_i_nom, const ActionBounds& bounds_i,
                                    const ActionBounds& bounds_j, DynamicsKind kind) {
  const BarrierConstraint c = linearize_barrier_constraint(b, s_rel, kind);

  BoxQp qp;
  qp.dims = 2;
  qp.nom = {a_i_nom[0], a_i_nom[1]};
  qp.g = {c.gi[0], c.gi[1]};
  qp.lo = {bounds_i.lo[0], bounds_i.lo[1]};
  qp.hi = {bounds_i.hi[0], bounds_i.hi[1]};
  // Worst-case opponent: fold min over its box into the constant term.
  qp.c0 = c.c0;
  for (int k = 0; k < 2; ++k) {
    qp.c0 += c.gj[k] >= 0.0 ? c.gj[k] * bounds_j.lo[k] : c.gj[k] * bounds_j.hi[k];
  }

  const BoxQpSolution sol = solve_box_qp(qp);
  FilterOutcome out;
  out.a_i = {sol.a[0], sol.a[1]};
  out.has_a_j = false;
  out.active = sol.active;
  out.feasible = sol.feasible;
  out.constraint_value = sol.constraint_value;
  out.multiplier = sol.multiplier;
  return out;
}

}  // namespace cbvf
