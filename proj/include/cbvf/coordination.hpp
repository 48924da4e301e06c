#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cbvf/dynamics.hpp"
#include "cbvf/grid.hpp"

namespace cbvf {

struct NeighborAssessment {
  int neighbor_id = -1;
  double distance = 0.0;
  double barrier_value = 0.0;    // V_coop(s_ij) - r_safety
  double worstcase_value = 0.0;  // V_worst(s_ij)
  bool within_conflict_range = false;
  bool off_grid = false;  // relative state clamped onto the grid for lookup
};

// One assessment per neighbor within r_obs, ordered by ascending barrier value
// with the neighbor id as tie-break. Pairs beyond the grid extent are treated
// as barrier = +inf (never prioritized) and flagged.
std::vector<NeighborAssessment> assess_neighbors(
    const AgentState& ego, const std::vector<std::pair<int, AgentState>>& neighbors,
    const ValueField& coop_field, const ValueField& worst_field, double r_safety,
    double r_conflict, double r_obs, DynamicsKind kind);

std::optional<int> select_priority(const std::vector<NeighborAssessment>& assessments);

// selection[i] is agent i's prioritized neighbor. A pair (i, j) is returned
// exactly when the selection is mutual; pairs are ordered i < j.
std::vector<std::pair<int, int>> detect_collision_pairs(
    const std::vector<std::optional<int>>& selection);

struct ConflictRadius {
  double radius = 0.0;
  double tolerance = 0.0;  // one position-cell diagonal
};

// Smallest range certifying that any pair farther apart than it has field
// value >= r_safety, up to grid resolution: the max node distance over the
// sublevel set {value < r_safety}. Errors when that set touches the position
// boundary (the grid is too small to certify a radius).
ConflictRadius compute_conflict_radius(const ValueField& field, double r_safety);

// Sum over approaching neighbors inside r_conflict of
//   max{0, r_conflict - dist} * max{0, -(x_rel*vx_rel + y_rel*vy_rel)},
// gated to zero unless strictly more than one neighbor is inside r_conflict.
double conflict_penalty(const AgentState& ego,
                        const std::vector<std::pair<int, AgentState>>& neighbors,
                        double r_conflict, DynamicsKind kind);

struct PenaltyAlternatives {
  double c_plain = 0.0;      // max{0, r_safety - dist}
  double c_cbvf = 0.0;       // max{0, -B}
  double c_normdiff = 0.0;   // ||a_safe - a_nom||
};

PenaltyAlternatives penalty_alternatives(double distance, double barrier, const ActionVec& a_nom,
                                         const ActionVec& a_safe, double r_safety);

struct ConflictReport {
  int n_within_conflict_range = 0;
  bool in_exact_conflict_free_set = false;   // all V >= r_safety, at most one V_worst < r_safety
  bool in_approx_conflict_free_set = false;  // all V >= r_safety, at most one dist < r_conflict
  double c_conflict = 0.0;
  double c_plain = 0.0;
  double c_cbvf = 0.0;
  double c_normdiff = 0.0;
  bool any_pair_off_grid = false;
};

ConflictReport check_conflict_free(const AgentState& ego,
                                   const std::vector<std::pair<int, AgentState>>& neighbors,
                                   const ValueField& coop_field, const ValueField& worst_field,
                                   double r_safety, double r_conflict, double r_obs,
                                   DynamicsKind kind, double a_diff_norm = 0.0);

}  // namespace cbvf
