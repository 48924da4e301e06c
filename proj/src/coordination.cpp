#include "cbvf/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cbvf {

namespace {

bool rel_in_grid(const GridSpec& g, const RelVec& s) {
  for (int k = 0; k < g.ndim; ++k) {
    if (g.axes[k].periodic) continue;
    if (s[k] < g.axes[k].lo - 1e-9 || s[k] > g.axes[k].hi + 1e-9) return false;
  }
  return true;
}

Vec2 world_relative_velocity(const AgentState& ego, const AgentState& nb, DynamicsKind kind) {
  const Vec2 vi = velocity(ego, kind);
  const Vec2 vj = velocity(nb, kind);
  return vj - vi;
}

}  // namespace

std::vector<NeighborAssessment> assess_neighbors(
    const AgentState& ego, const std::vector<std::pair<int, AgentState>>& neighbors,
    const ValueField& coop_field, const ValueField& worst_field, double r_safety,
    double r_conflict, double r_obs, DynamicsKind kind) {
  std::vector<NeighborAssessment> out;
  out.reserve(neighbors.size());
  for (const auto& [id, nb] : neighbors) {
    const RelVec s_rel = relative_state(ego, nb, kind);
    const double d = rel_distance(s_rel);
    if (d > r_obs) continue;

    NeighborAssessment a;
    a.neighbor_id = id;
    a.distance = d;
    a.within_conflict_range = d < r_conflict;
    if (rel_in_grid(coop_field.grid, s_rel)) {
      a.barrier_value = interpolate(coop_field, s_rel) - r_safety;
      a.worstcase_value = interpolate(worst_field, s_rel);
    } else {
      a.off_grid = true;
      a.barrier_value = std::numeric_limits<double>::infinity();
      a.worstcase_value = interpolate_clamped(worst_field, s_rel);
    }
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [](const NeighborAssessment& l, const NeighborAssessment& r) {
    if (l.barrier_value != r.barrier_value) return l.barrier_value < r.barrier_value;
    return l.neighbor_id < r.neighbor_id;
  });
  return out;
}

std::optional<int> select_priority(const std::vector<NeighborAssessment>& assessments) {
  if (assessments.empty()) return std::nullopt;
  return assessments.front().neighbor_id;
}

std::vector<std::pair<int, int>> detect_collision_pairs(
    const std::vector<std::optional<int>>& selection) {
  std::vector<std::pair<int, int>> pairs;
  const int n = static_cast<int>(selection.size());
  for (int i = 0; i < n; ++i) {
    if (!selection[i]) continue;
    const int j = *selection[i];
    if (j > i && j < n && selection[j] && *selection[j] == i) pairs.emplace_back(i, j);
  }
  return pairs;
}

ConflictRadius compute_conflict_radius(const ValueField& field, double r_safety) {
  const GridSpec& g = field.grid;
  const auto strides = g.strides();
  const std::size_t n = g.num_nodes();

  double max_dist = 0.0;
  bool any = false;
  std::array<int, 5> mi{};
  for (std::size_t idx = 0; idx < n; ++idx) {
    g.unflatten(idx, mi);
    if (field.values[idx] < r_safety) {
      if (mi[0] == 0 || mi[0] == g.axes[0].n - 1 || mi[1] == 0 || mi[1] == g.axes[1].n - 1) {
        throw BRTTouchesBoundary(
            "sublevel set {V < r_safety} touches the position boundary; enlarge the grid");
      }
      const double d = std::hypot(g.axes[0].coord(mi[0]), g.axes[1].coord(mi[1]));
      max_dist = std::max(max_dist, d);
      any = true;
    }
  }

  ConflictRadius r;
  r.tolerance = std::hypot(g.axes[0].spacing(), g.axes[1].spacing());
  // A node at dist just below r_safety always has value <= dist < r_safety, so
  // the certified range can never be smaller than r_safety itself.
  r.radius = any ? std::max(max_dist, r_safety) : r_safety * (r_safety > 0.0 ? 1.0 : 0.0);
  return r;
}

double conflict_penalty(const AgentState& ego,
                        const std::vector<std::pair<int, AgentState>>& neighbors,
                        double r_conflict, DynamicsKind kind) {
  int inside = 0;
  double sum = 0.0;
  for (const auto& [id, nb] : neighbors) {
    (void)id;
    const Vec2 rel = position(nb) - position(ego);
    const double d = rel.norm();
    if (d >= r_conflict) continue;
    ++inside;
    const Vec2 v_rel = world_relative_velocity(ego, nb, kind);
    const double range_term = r_conflict - d;
    const double closing_term = std::max(0.0, -rel.dot(v_rel));
    sum += range_term * closing_term;
  }
  return inside > 1 ? sum : 0.0;
}

PenaltyAlternatives penalty_alternatives(double distance, double barrier, const ActionVec& a_nom,
                                         const ActionVec& a_safe, double r_safety) {
  PenaltyAlternatives p;
  p.c_plain = std::max(0.0, r_safety - distance);
  p.c_cbvf = std::max(0.0, -barrier);
  p.c_normdiff = std::hypot(a_safe[0] - a_nom[0], a_safe[1] - a_nom[1]);
  return p;
}

ConflictReport check_conflict_free(const AgentState& ego,
                                   const std::vector<std::pair<int, AgentState>>& neighbors,
                                   const ValueField& coop_field, const ValueField& worst_field,
                                   double r_safety, double r_conflict, double r_obs,
                                   DynamicsKind kind, double a_diff_norm) {
  ConflictReport rep;
  rep.in_exact_conflict_free_set = true;
  rep.in_approx_conflict_free_set = true;

  int n_worst_below = 0;
  double min_barrier = std::numeric_limits<double>::infinity();
  double min_barrier_dist = std::numeric_limits<double>::infinity();

  for (const auto& [id, nb] : neighbors) {
    (void)id;
    const RelVec s_rel = relative_state(ego, nb, kind);
    const double d = rel_distance(s_rel);
    if (d > r_obs) continue;

    double v_coop, v_worst;
    if (rel_in_grid(coop_field.grid, s_rel)) {
      v_coop = interpolate(coop_field, s_rel);
      v_worst = interpolate(worst_field, s_rel);
    } else {
      rep.any_pair_off_grid = true;
      v_coop = interpolate_clamped(coop_field, s_rel);
      v_worst = interpolate_clamped(worst_field, s_rel);
    }

    if (v_coop < r_safety) {
      rep.in_exact_conflict_free_set = false;
      rep.in_approx_conflict_free_set = false;
    }
    if (v_worst < r_safety) ++n_worst_below;
    if (d < r_conflict) ++rep.n_within_conflict_range;

    const double barrier = v_coop - r_safety;
    if (barrier < min_barrier) {
      min_barrier = barrier;
      min_barrier_dist = d;
    }
  }

  if (n_worst_below > 1) rep.in_exact_conflict_free_set = false;
  if (rep.n_within_conflict_range > 1) rep.in_approx_conflict_free_set = false;

  rep.c_conflict = conflict_penalty(ego, neighbors, r_conflict, kind);
  if (std::isfinite(min_barrier)) {
    const PenaltyAlternatives p = penalty_alternatives(min_barrier_dist, min_barrier, {0.0, 0.0},
                                                       {0.0, 0.0}, r_safety);
    rep.c_plain = p.c_plain;
    rep.c_cbvf = p.c_cbvf;
  }
  rep.c_normdiff = a_diff_norm;
  return rep;
}

}  // namespace cbvf
