#pragma once

#include "cbvf/dynamics.hpp"
#include "cbvf/grid.hpp"

namespace cbvf {

// B(s) = V(s) - r_safety over an interpolated value field. The cooperative
// filter expects a Cooperative field, the non-cooperative filter a WorstCase
// field.
struct Barrier {
  const ValueField* field = nullptr;
  double r_safety = 0.0;
  double gamma = 1.0;  // barrier rate constant, 1/s
};

double barrier_value(const Barrier& b, const RelVec& s_rel);
double barrier_value_clamped(const Barrier& b, const RelVec& s_rel);

// Linearization of the barrier constraint at s_rel:
//   lhs(a_i, a_j) = c0 + gi . a_i + gj . a_j  >= 0
struct BarrierConstraint {
  double c0 = 0.0;
  ActionVec gi{};
  ActionVec gj{};
};

BarrierConstraint linearize_barrier_constraint(const Barrier& b, const RelVec& s_rel,
                                               DynamicsKind kind);

double barrier_constraint_lhs(const Barrier& b, const RelVec& s_rel, const ActionVec& a_i,
                              const ActionVec& a_j, DynamicsKind kind);

struct FilterOutcome {
  ActionVec a_i{};
  ActionVec a_j{};
  bool has_a_j = false;  // cooperative solves return both actions
  bool active = false;   // constraint binding at the nominal pair
  bool feasible = true;
  double constraint_value = 0.0;
  double multiplier = 0.0;  // KKT multiplier; stationarity 2(a - nom) = multiplier * g
};

// Minimally modifies the nominal pair subject to the barrier constraint and
// the action boxes. Solved exactly: a(mu) = clip(nominal + mu * g) with the
// constraint value nondecreasing in mu >= 0, root by bisection. When the
// constraint cannot be met even fully saturated, returns feasible = false and
// the least-violating action.
FilterOutcome filter_cooperative(const Barrier& b, const RelVec& s_rel, const ActionVec& a_i_nom,
                                 const ActionVec& a_j_nom, const ActionBounds& bounds_i,
                                 const ActionBounds& bounds_j, DynamicsKind kind);

// Ego-only filter against a worst-case opponent: the inner minimization over
// the opponent box folds into the constant term, leaving a single-agent solve.
FilterOutcome filter_noncooperative(const Barrier& b, const RelVec& s_rel,
                                    const ActionVec& a_i_nom, const ActionBounds& bounds_i,
                                    const ActionBounds& bounds_j, DynamicsKind kind);

}  // namespace cbvf
