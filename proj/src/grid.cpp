#include "cbvf/grid.hpp"

#include <cmath>

namespace cbvf {

GridSpec GridSpec::default_relative(DynamicsKind kind) {
  GridSpec g;
  if (kind == DynamicsKind::AirTaxi) {
    g.ndim = 5;
    g.axes[0] = {61, -6000.0, 6000.0, false};
    g.axes[1] = {61, -6000.0, 6000.0, false};
    g.axes[2] = {31, -kPi, kPi, true};
    g.axes[3] = {7, 30.9, 90.0, false};
    g.axes[4] = {7, 30.9, 90.0, false};
  } else {
    g.ndim = 4;
    g.axes[0] = {41, -4.0, 4.0, false};
    g.axes[1] = {41, -4.0, 4.0, false};
    g.axes[2] = {21, -1.0, 1.0, false};
    g.axes[3] = {21, -1.0, 1.0, false};
  }
  return g;
}

GridSpec GridSpec::default_waypoint_frame() {
  GridSpec g;
  g.ndim = 4;
  g.axes[0] = {81, -12000.0, 12000.0, false};
  g.axes[1] = {81, -12000.0, 12000.0, false};
  g.axes[2] = {31, -kPi, kPi, true};
  g.axes[3] = {7, 30.9, 90.0, false};
  return g;
}

namespace {

struct AxisQuery {
  int i0;      // lower node index
  int i1;      // upper node index (wrapped on periodic axes)
  double frac;  // weight of the upper node
};

// Resolves the query coordinate on one axis. Returns false when out of bounds
// on a non-periodic axis (and clamping is off).
bool resolve_axis(const AxisSpec& ax, double p, bool clamped, AxisQuery& out) {
  const double h = ax.spacing();
  if (ax.periodic) {
    double t = (p - ax.lo) / h;
    t -= std::floor(t / ax.n) * ax.n;
    if (t >= ax.n) t -= ax.n;  // guard rounding at the seam
    out.i0 = static_cast<int>(t);
    if (out.i0 >= ax.n) out.i0 = ax.n - 1;
    out.frac = t - out.i0;
    out.i1 = (out.i0 + 1) % ax.n;
    return true;
  }
  double t = (p - ax.lo) / h;
  const double eps = 1e-9;
  if (t < -eps || t > ax.n - 1 + eps) {
    if (!clamped) return false;
    t = clamp(t, 0.0, static_cast<double>(ax.n - 1));
  }
  t = clamp(t, 0.0, static_cast<double>(ax.n - 1));
  out.i0 = static_cast<int>(t);
  if (out.i0 >= ax.n - 1) out.i0 = ax.n - 2;
  out.frac = t - out.i0;
  out.i1 = out.i0 + 1;
  return true;
}

double interpolate_impl(const ValueField& field, const RelVec& point, bool clamped) {
  const GridSpec& g = field.grid;
  std::array<AxisQuery, 5> q{};
  for (int k = 0; k < g.ndim; ++k) {
    if (!resolve_axis(g.axes[k], point[k], clamped, q[k])) throw OutOfBounds(k);
  }
  const auto strides = g.strides();
  const int corners = 1 << g.ndim;
  double acc = 0.0;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int k = 0; k < g.ndim; ++k) {
      const bool up = (c >> k) & 1;
      w *= up ? q[k].frac : (1.0 - q[k].frac);
      idx += static_cast<std::size_t>(up ? q[k].i1 : q[k].i0) * strides[k];
    }
    if (w != 0.0) acc += w * field.values[idx];
  }
  return acc;
}

}  // namespace

double interpolate(const ValueField& field, const RelVec& point) {
  return interpolate_impl(field, point, false);
}

double interpolate_clamped(const ValueField& field, const RelVec& point) {
  return interpolate_impl(field, point, true);
}

std::array<double, 5> gradient(const ValueField& field, const RelVec& point) {
  const GridSpec& g = field.grid;
  std::array<double, 5> grad{};
  for (int k = 0; k < g.ndim; ++k) {
    const AxisSpec& ax = g.axes[k];
    const double half = 0.5 * ax.spacing();
    RelVec lo_pt = point;
    RelVec hi_pt = point;
    if (ax.periodic) {
      lo_pt[k] = point[k] - half;
      hi_pt[k] = point[k] + half;
      grad[k] = (interpolate_impl(field, hi_pt, false) - interpolate_impl(field, lo_pt, false)) /
                (2.0 * half);
    } else {
      lo_pt[k] = std::max(ax.lo, point[k] - half);
      hi_pt[k] = std::min(ax.hi, point[k] + half);
      const double span = hi_pt[k] - lo_pt[k];
      if (span <= 0.0) throw OutOfBounds(k);
      grad[k] = (interpolate_impl(field, hi_pt, false) - interpolate_impl(field, lo_pt, false)) /
                span;
    }
  }
  return grad;
}

}  // namespace cbvf
