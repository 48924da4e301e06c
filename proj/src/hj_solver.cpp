#include "cbvf/hj_solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

namespace cbvf {

SolveSettings default_solve_settings(DynamicsKind kind) {
  SolveSettings s;
  if (kind == DynamicsKind::AirTaxi) {
    s.convergence_tol = 1e-3 * 670.56;
    s.max_iters = 6000;
  } else {
    s.convergence_tol = 1e-3 * 0.5;
    s.max_iters = 4000;
  }
  return s;
}

namespace {

inline double max_lin(double c, double lo, double hi) { return c >= 0.0 ? c * hi : c * lo; }
inline double min_lin(double c, double lo, double hi) { return c >= 0.0 ? c * lo : c * hi; }

std::vector<double> axis_coords(const AxisSpec& ax) {
  std::vector<double> v(ax.n);
  for (int i = 0; i < ax.n; ++i) v[i] = ax.coord(i);
  return v;
}

void validate_grid(const GridSpec& grid, int expected_dim) {
  if (grid.ndim != expected_dim) {
    throw ConfigInvalid("grid has " + std::to_string(grid.ndim) + " axes, dynamics needs " +
                        std::to_string(expected_dim));
  }
  for (int k = 0; k < grid.ndim; ++k) {
    const AxisSpec& ax = grid.axes[k];
    if (ax.n < 3) throw GridTooCoarse("axis " + std::to_string(k) + " has fewer than 3 nodes");
    if (!(ax.lo < ax.hi)) throw ConfigInvalid("axis bounds must satisfy lo < hi");
    if (ax.periodic && std::abs((ax.hi - ax.lo) - 2.0 * kPi) > 1e-9) {
      throw ConfigInvalid("periodic axis span must be exactly 2*pi");
    }
  }
}

// One marching sweep of
//   U = min( cap, W + dt * ( H(node, pbar) + 0.5 * sum_k alpha_k (p+_k - p-_k) ) )
// over a flat node range. The update map is monotone under the CFL condition
// dt <= cfl / sum(alpha_k / h_k), so iterates decrease pointwise from the cap
// and the residual sequence is non-increasing.
//
// Model provides: ndim, hamiltonian(mi, pbar), cap(mi).
template <typename Model>
double sweep_range(const Model& model, const GridSpec& grid, const double* w, double* u,
                   const double* alphas, double dt, std::size_t begin, std::size_t end) {
  const int nd = model.ndim;
  const auto strides = grid.strides();
  std::array<int, 5> mi{};
  grid.unflatten(begin, mi);
  std::array<double, 5> inv_h{};
  for (int k = 0; k < nd; ++k) inv_h[k] = 1.0 / grid.axes[k].spacing();

  double residual = 0.0;
  for (std::size_t idx = begin; idx < end; ++idx) {
    const double wc = w[idx];
    double pbar[5];
    double diss = 0.0;
    for (int k = 0; k < nd; ++k) {
      const AxisSpec& ax = grid.axes[k];
      const int i = mi[k];
      double wm, wp;
      bool has_m = true, has_p = true;
      if (i > 0) {
        wm = w[idx - strides[k]];
      } else if (ax.periodic) {
        wm = w[idx + static_cast<std::size_t>(ax.n - 1) * strides[k]];
      } else {
        wm = 0.0;
        has_m = false;
      }
      if (i < ax.n - 1) {
        wp = w[idx + strides[k]];
      } else if (ax.periodic) {
        wp = w[idx - static_cast<std::size_t>(ax.n - 1) * strides[k]];
      } else {
        wp = 0.0;
        has_p = false;
      }
      double pm = has_m ? (wc - wm) * inv_h[k] : 0.0;
      double pp = has_p ? (wp - wc) * inv_h[k] : 0.0;
      if (!has_m) pm = pp;  // one-sided at non-periodic boundaries
      if (!has_p) pp = pm;
      pbar[k] = 0.5 * (pm + pp);
      diss += alphas[k] * (pp - pm);
    }
    double cand = wc + dt * (model.hamiltonian(mi.data(), pbar) + 0.5 * diss);
    if (Model::floor_at_zero && cand < 0.0) cand = 0.0;
    const double cap = model.cap(mi.data());
    const double next = cand < cap ? cand : cap;
    u[idx] = next;
    const double delta = std::abs(next - wc);
    if (delta > residual) residual = delta;

    // advance the multi-index
    for (int k = nd - 1; k >= 0; --k) {
      if (++mi[k] < grid.axes[k].n) break;
      mi[k] = 0;
    }
  }
  return residual;
}

struct MarchOutput {
  std::vector<double> values;
  SolveMeta meta;
};

// Time-marches the variational inequality to its fixed point. When
// crossing_times is non-null, records the first tau at which each node's value
// drops to zero or below (linearly interpolated between iterates).
template <typename Model>
MarchOutput march(const Model& model, const GridSpec& grid, const SolveSettings& settings,
                  const std::array<double, 5>& alphas, std::vector<double> init,
                  std::vector<double>* crossing_times) {
  const std::size_t n = grid.num_nodes();
  double rate = 0.0;
  for (int k = 0; k < model.ndim; ++k) rate += alphas[k] / grid.axes[k].spacing();
  const double dt = settings.cfl / rate;

  std::vector<double> w = std::move(init);
  std::vector<double> u(n);

  SolveMeta meta;
  meta.cfl = settings.cfl;
  meta.tol = settings.convergence_tol;
  meta.n_alphas = model.ndim;
  for (int k = 0; k < model.ndim; ++k) meta.alphas[k] = alphas[k];

  double tau = 0.0;
  for (int iter = 1; iter <= settings.max_iters; ++iter) {
    double residual = 0.0;
    std::mutex merge;
    parallel_for(
        n,
        [&](std::size_t b, std::size_t e) {
          const double local = sweep_range(model, grid, w.data(), u.data(), alphas.data(), dt, b, e);
          std::lock_guard<std::mutex> lk(merge);
          residual = std::max(residual, local);
        },
        settings.jobs);

    if (crossing_times) {
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] > 0.0 && u[i] <= 0.0) {
          (*crossing_times)[i] = tau + dt * (w[i] / (w[i] - u[i]));
        }
      }
    }
    std::swap(w, u);
    tau += dt;
    meta.iterations = iter;
    meta.residual = residual;
    if (residual < settings.convergence_tol) {
      meta.converged = true;
      break;
    }
  }

  return {std::move(w), meta};
}

// ---------------------------------------------------------------------------
// Pairwise relative models

struct AirTaxiModel {
  static constexpr int ndim = 5;
  bool worst_case = false;
  ActionBounds bi, bj;
  std::vector<double> xs, ys, ct, st, vi, vj;
  const double* cap2d = nullptr;  // dist over (x, y), length nx*ny
  int ny = 0;

  double hamiltonian(const int* mi, const double* p) const {
    const double x = xs[mi[0]], y = ys[mi[1]];
    const double c = ct[mi[2]], s = st[mi[2]];
    const double v_i = vi[mi[3]], v_j = vj[mi[4]];
    double h = p[0] * (-v_i + v_j * c) + p[1] * (v_j * s);
    const double c_wi = p[0] * y - p[1] * x - p[2];
    h += max_lin(c_wi, bi.lo[0], bi.hi[0]);
    h += max_lin(p[3], bi.lo[1], bi.hi[1]);
    if (worst_case) {
      h += min_lin(p[2], bj.lo[0], bj.hi[0]);
      h += min_lin(p[4], bj.lo[1], bj.hi[1]);
    } else {
      h += max_lin(p[2], bj.lo[0], bj.hi[0]);
      h += max_lin(p[4], bj.lo[1], bj.hi[1]);
    }
    return h;
  }

  double cap(const int* mi) const { return cap2d[mi[0] * ny + mi[1]]; }
};

struct DoubleIntegratorModel {
  static constexpr int ndim = 4;
  bool worst_case = false;
  ActionBounds bi, bj;
  std::vector<double> vx, vy;
  const double* cap2d = nullptr;
  int ny = 0;

  double hamiltonian(const int* mi, const double* p) const {
    double h = p[0] * vx[mi[2]] + p[1] * vy[mi[3]];
    h += max_lin(-p[2], bi.lo[0], bi.hi[0]);
    h += max_lin(-p[3], bi.lo[1], bi.hi[1]);
    if (worst_case) {
      h += min_lin(p[2], bj.lo[0], bj.hi[0]);
      h += min_lin(p[3], bj.lo[1], bj.hi[1]);
    } else {
      h += max_lin(p[2], bj.lo[0], bj.hi[0]);
      h += max_lin(p[3], bj.lo[1], bj.hi[1]);
    }
    return h;
  }

  double cap(const int* mi) const { return cap2d[mi[0] * ny + mi[1]]; }
};

std::vector<double> distance_table(const GridSpec& grid) {
  const int nx = grid.axes[0].n, ny = grid.axes[1].n;
  std::vector<double> d(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      d[static_cast<std::size_t>(i) * ny + j] = std::hypot(grid.axes[0].coord(i), grid.axes[1].coord(j));
    }
  }
  return d;
}

std::vector<double> expand_cap(const GridSpec& grid, const std::vector<double>& cap2d) {
  const std::size_t n = grid.num_nodes();
  std::vector<double> init(n);
  const int ny = grid.axes[1].n;
  std::size_t inner = 1;
  for (int k = 2; k < grid.ndim; ++k) inner *= static_cast<std::size_t>(grid.axes[k].n);
  std::size_t idx = 0;
  for (int i = 0; i < grid.axes[0].n; ++i) {
    for (int j = 0; j < ny; ++j) {
      const double d = cap2d[static_cast<std::size_t>(i) * ny + j];
      for (std::size_t r = 0; r < inner; ++r) init[idx++] = d;
    }
  }
  return init;
}

ValueField solve_pairwise(DynamicsKind kind, bool worst_case, const ActionBounds& bi,
                          const ActionBounds& bj, const GridSpec& grid,
                          const SolveSettings& settings) {
  validate_grid(grid, rel_dim(kind));

  ValueField field;
  field.grid = grid;
  field.kind = worst_case ? FieldKind::WorstCase : FieldKind::Cooperative;
  field.dynamics = kind;

  const std::vector<double> cap2d = distance_table(grid);
  std::vector<double> init = expand_cap(grid, cap2d);

  std::array<double, 5> alphas{};
  MarchOutput out;
  if (kind == DynamicsKind::AirTaxi) {
    AirTaxiModel m;
    m.worst_case = worst_case;
    m.bi = bi;
    m.bj = bj;
    m.xs = axis_coords(grid.axes[0]);
    m.ys = axis_coords(grid.axes[1]);
    const auto thetas = axis_coords(grid.axes[2]);
    m.ct.resize(thetas.size());
    m.st.resize(thetas.size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      m.ct[i] = std::cos(thetas[i]);
      m.st[i] = std::sin(thetas[i]);
    }
    m.vi = axis_coords(grid.axes[3]);
    m.vj = axis_coords(grid.axes[4]);
    m.cap2d = cap2d.data();
    m.ny = grid.axes[1].n;

    const double xmax = std::max(std::abs(grid.axes[0].lo), std::abs(grid.axes[0].hi));
    const double ymax = std::max(std::abs(grid.axes[1].lo), std::abs(grid.axes[1].hi));
    const double vimax = std::max(std::abs(grid.axes[3].lo), std::abs(grid.axes[3].hi));
    const double vjmax = std::max(std::abs(grid.axes[4].lo), std::abs(grid.axes[4].hi));
    const double wi = std::max(std::abs(bi.lo[0]), std::abs(bi.hi[0]));
    const double wj = std::max(std::abs(bj.lo[0]), std::abs(bj.hi[0]));
    alphas[0] = vimax + vjmax + ymax * wi;
    alphas[1] = vjmax + xmax * wi;
    alphas[2] = wi + wj;
    alphas[3] = std::max(std::abs(bi.lo[1]), std::abs(bi.hi[1]));
    alphas[4] = std::max(std::abs(bj.lo[1]), std::abs(bj.hi[1]));
    out = march(m, grid, settings, alphas, std::move(init), nullptr);
  } else {
    DoubleIntegratorModel m;
    m.worst_case = worst_case;
    m.bi = bi;
    m.bj = bj;
    m.vx = axis_coords(grid.axes[2]);
    m.vy = axis_coords(grid.axes[3]);
    m.cap2d = cap2d.data();
    m.ny = grid.axes[1].n;

    alphas[0] = std::max(std::abs(grid.axes[2].lo), std::abs(grid.axes[2].hi));
    alphas[1] = std::max(std::abs(grid.axes[3].lo), std::abs(grid.axes[3].hi));
    alphas[2] = std::max(std::abs(bi.lo[0]), std::abs(bi.hi[0])) +
                std::max(std::abs(bj.lo[0]), std::abs(bj.hi[0]));
    alphas[3] = std::max(std::abs(bi.lo[1]), std::abs(bi.hi[1])) +
                std::max(std::abs(bj.lo[1]), std::abs(bj.hi[1]));
    out = march(m, grid, settings, alphas, std::move(init), nullptr);
  }

  field.values = std::move(out.values);
  field.meta = out.meta;
  return field;
}

// ---------------------------------------------------------------------------
// Time-to-reach model

struct TimeToReachModel {
  static constexpr int ndim = 4;
  ActionBounds bounds;
  std::vector<double> ct, st, vs;
  const double* target_measure = nullptr;  // full-grid cap array

  double hamiltonian(const int* mi, const double* p) const {
    const double v = vs[mi[3]];
    double h = p[0] * v * ct[mi[2]] + p[1] * v * st[mi[2]];
    h += min_lin(p[2], bounds.lo[0], bounds.hi[0]);
    h += min_lin(p[3], bounds.lo[1], bounds.hi[1]);
    return h;
  }

  double cap(const int* mi) const { return target_measure[flat(mi)]; }

  std::size_t flat(const int* mi) const {
    return ((static_cast<std::size_t>(mi[0]) * n1 + mi[1]) * n2 + mi[2]) * n3 + mi[3];
  }
  std::size_t n1 = 0, n2 = 0, n3 = 0;
};

}  // namespace

ValueField solve_cooperative_value(DynamicsKind kind, const ActionBounds& bounds_i,
                                   const ActionBounds& bounds_j, const GridSpec& grid,
                                   const SolveSettings& settings) {
  return solve_pairwise(kind, false, bounds_i, bounds_j, grid, settings);
}

ValueField solve_worstcase_value(DynamicsKind kind, const ActionBounds& bounds_i,
                                 const ActionBounds& bounds_j, const GridSpec& grid,
                                 const SolveSettings& settings) {
  return solve_pairwise(kind, true, bounds_i, bounds_j, grid, settings);
}

ValueField solve_time_to_reach(const WaypointTarget& target, const ActionBounds& bounds,
                               const VehicleLimits& limits, const GridSpec& grid,
                               const SolveSettings& settings) {
  validate_grid(grid, 4);

  TimeToReachModel m;
  m.bounds = bounds;
  const auto thetas = axis_coords(grid.axes[2]);
  m.ct.resize(thetas.size());
  m.st.resize(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    m.ct[i] = std::cos(thetas[i]);
    m.st[i] = std::sin(thetas[i]);
  }
  m.vs = axis_coords(grid.axes[3]);
  m.n1 = static_cast<std::size_t>(grid.axes[1].n);
  m.n2 = static_cast<std::size_t>(grid.axes[2].n);
  m.n3 = static_cast<std::size_t>(grid.axes[3].n);

  // Signed target measure, expressed in meters on every coordinate so the
  // level-set marching sees a consistent scale.
  const std::size_t n = grid.num_nodes();
  std::vector<double> g(n);
  const double heading_scale = target.dist_threshold / target.heading_threshold;
  const double speed_scale = target.dist_threshold / target.speed_threshold;
  bool any_inside = false;
  std::array<int, 5> mi{};
  for (std::size_t idx = 0; idx < n; ++idx) {
    grid.unflatten(idx, mi);
    const double x = grid.axes[0].coord(mi[0]);
    const double y = grid.axes[1].coord(mi[1]);
    const double th = grid.axes[2].coord(mi[2]);
    const double v = grid.axes[3].coord(mi[3]);
    const double gd = std::hypot(x, y) - target.dist_threshold;
    const double gh = (std::abs(wrap_angle(th)) - target.heading_threshold) * heading_scale;
    const double gv = (std::abs(v - target.desired_speed) - target.speed_threshold) * speed_scale;
    const double val = std::max(gd, std::max(gh, gv));
    g[idx] = val;
    if (val <= 0.0) any_inside = true;
  }
  if (!any_inside) throw EmptyTarget("waypoint thresholds select no grid node");
  (void)limits;

  std::array<double, 5> alphas{};
  const double vmax = std::max(std::abs(grid.axes[3].lo), std::abs(grid.axes[3].hi));
  alphas[0] = vmax;
  alphas[1] = vmax;
  alphas[2] = std::max(std::abs(bounds.lo[0]), std::abs(bounds.hi[0]));
  alphas[3] = std::max(std::abs(bounds.lo[1]), std::abs(bounds.hi[1]));

  std::vector<double> ttr(n, kUnreachable);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (g[idx] <= 0.0) ttr[idx] = 0.0;
  }

  TimeToReachModel model = m;
  model.target_measure = g.data();
  MarchOutput out = march(model, grid, settings, alphas, std::vector<double>(g), &ttr);

  ValueField field;
  field.grid = grid;
  field.kind = FieldKind::TimeToReach;
  field.dynamics = DynamicsKind::AirTaxi;
  field.values = std::move(ttr);
  field.meta = out.meta;
  return field;
}

namespace {

struct ToySingleIntegratorModel {
  static constexpr int ndim = 2;
  bool worst_case = false;
  double ui = 1.0, uj = 1.0;
  const double* cap2d = nullptr;
  int ny = 0;

  double hamiltonian(const int*, const double* p) const {
    // flow (u_jx - u_ix, u_jy - u_iy), per-component bounds
    double h = std::abs(p[0]) * ui + std::abs(p[1]) * ui;
    if (worst_case) {
      h -= std::abs(p[0]) * uj + std::abs(p[1]) * uj;
    } else {
      h += std::abs(p[0]) * uj + std::abs(p[1]) * uj;
    }
    return h;
  }

  double cap(const int* mi) const { return cap2d[mi[0] * ny + mi[1]]; }
};

struct ToyDoubleIntegrator1DModel {
  static constexpr int ndim = 2;
  bool worst_case = false;
  double ai = 0.5, aj = 0.5;
  std::vector<double> vs;
  std::vector<double> cap1d;  // |x| per x index

  double hamiltonian(const int* mi, const double* p) const {
    double h = p[0] * vs[mi[1]];
    h += std::abs(p[1]) * ai;
    h += worst_case ? -std::abs(p[1]) * aj : std::abs(p[1]) * aj;
    return h;
  }

  double cap(const int* mi) const { return cap1d[mi[0]]; }
};

}  // namespace

ValueField solve_toy_single_integrator(double u_max_i, double u_max_j, const GridSpec& grid,
                                       FieldKind game, const SolveSettings& settings) {
  validate_grid(grid, 2);
  ToySingleIntegratorModel m;
  m.worst_case = game == FieldKind::WorstCase;
  m.ui = u_max_i;
  m.uj = u_max_j;
  const std::vector<double> cap2d = distance_table(grid);
  m.cap2d = cap2d.data();
  m.ny = grid.axes[1].n;

  std::array<double, 5> alphas{};
  alphas[0] = u_max_i + u_max_j;
  alphas[1] = u_max_i + u_max_j;

  MarchOutput out = march(m, grid, settings, alphas, expand_cap(grid, cap2d), nullptr);
  ValueField f;
  f.grid = grid;
  f.kind = game;
  f.dynamics = DynamicsKind::DoubleIntegrator;
  f.values = std::move(out.values);
  f.meta = out.meta;
  return f;
}

ValueField solve_toy_double_integrator_1d(double a_max_i, double a_max_j, const GridSpec& grid,
                                          FieldKind game, const SolveSettings& settings) {
  validate_grid(grid, 2);
  ToyDoubleIntegrator1DModel m;
  m.worst_case = game == FieldKind::WorstCase;
  m.ai = a_max_i;
  m.aj = a_max_j;
  m.vs = axis_coords(grid.axes[1]);
  m.cap1d.resize(grid.axes[0].n);
  for (int i = 0; i < grid.axes[0].n; ++i) m.cap1d[i] = std::abs(grid.axes[0].coord(i));

  std::array<double, 5> alphas{};
  alphas[0] = std::max(std::abs(grid.axes[1].lo), std::abs(grid.axes[1].hi));
  alphas[1] = a_max_i + a_max_j;

  const std::size_t n = grid.num_nodes();
  std::vector<double> init(n);
  std::array<int, 5> mi{};
  for (std::size_t idx = 0; idx < n; ++idx) {
    grid.unflatten(idx, mi);
    init[idx] = m.cap1d[mi[0]];
  }

  MarchOutput out = march(m, grid, settings, alphas, std::move(init), nullptr);
  ValueField f;
  f.grid = grid;
  f.kind = game;
  f.dynamics = DynamicsKind::DoubleIntegrator;
  f.values = std::move(out.values);
  f.meta = out.meta;
  return f;
}

}  // namespace cbvf
