#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cbvf/common.hpp"
#include "cbvf/dynamics.hpp"

namespace cbvf {

struct AxisSpec {
  int n = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;

  // Periodic axes do not duplicate the endpoint node.
  double spacing() const { return periodic ? (hi - lo) / n : (hi - lo) / (n - 1); }
  double coord(int idx) const { return lo + idx * spacing(); }
};

struct GridSpec {
  std::array<AxisSpec, 5> axes{};
  int ndim = 0;

  std::size_t num_nodes() const {
    std::size_t n = 1;
    for (int k = 0; k < ndim; ++k) n *= static_cast<std::size_t>(axes[k].n);
    return n;
  }

  std::array<std::size_t, 5> strides() const {
    std::array<std::size_t, 5> s{};
    std::size_t acc = 1;
    for (int k = ndim - 1; k >= 0; --k) {
      s[k] = acc;
      acc *= static_cast<std::size_t>(axes[k].n);
    }
    return s;
  }

  void unflatten(std::size_t idx, std::array<int, 5>& mi) const {
    for (int k = ndim - 1; k >= 0; --k) {
      mi[k] = static_cast<int>(idx % static_cast<std::size_t>(axes[k].n));
      idx /= static_cast<std::size_t>(axes[k].n);
    }
  }

  bool operator==(const GridSpec& o) const {
    if (ndim != o.ndim) return false;
    for (int k = 0; k < ndim; ++k) {
      if (axes[k].n != o.axes[k].n || axes[k].lo != o.axes[k].lo || axes[k].hi != o.axes[k].hi ||
          axes[k].periodic != o.axes[k].periodic) {
        return false;
      }
    }
    return true;
  }

  // Relative-state grids matching the layout of rel_dim(kind).
  static GridSpec default_relative(DynamicsKind kind);
  // Waypoint-frame grid (x, y, theta, v) for the time-to-reach solve.
  static GridSpec default_waypoint_frame();
};

enum class FieldKind : int { Cooperative = 0, WorstCase = 1, TimeToReach = 2 };

// Nodes from which the target set cannot be reached keep this sentinel.
inline constexpr double kUnreachable = 1e30;

struct SolveMeta {
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double cfl = 0.0;
  double tol = 0.0;
  int n_alphas = 0;
  std::array<double, 5> alphas{};
};

struct ValueField {
  GridSpec grid;
  FieldKind kind = FieldKind::Cooperative;
  DynamicsKind dynamics = DynamicsKind::DoubleIntegrator;
  std::vector<double> values;
  SolveMeta meta;
};

// Multilinear interpolation. Throws OutOfBounds on non-periodic axes; the
// clamped variant projects the query onto the grid box instead.
double interpolate(const ValueField& field, const RelVec& point);
double interpolate_clamped(const ValueField& field, const RelVec& point);

// Central finite difference of the interpolant, step = half grid spacing per
// axis. Near a non-periodic boundary the stencil is shifted inside the box.
std::array<double, 5> gradient(const ValueField& field, const RelVec& point);

}  // namespace cbvf
