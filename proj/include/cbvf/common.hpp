#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace cbvf {

inline constexpr double kPi = 3.14159265358979323846;

// Unit conversion factors into SI (applied once, at config-parse time).
inline constexpr double kMetersPerFoot = 0.3048;
inline constexpr double kMetersPerSecondPerKnot = 0.5144;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
// <random> distributions so traces are reproducible independent of the
// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Derives an independent stream, e.g. one per episode.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t idx) {
    Rng r(base ^ (0x5851f42d4c957f2dULL * (idx + 1)));
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

// Runs fn(begin, end) over [0, n) split across worker threads. Falls back to a
// direct call when a single core is available or the range is small.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                         unsigned jobs = 0) {
  if (jobs == 0) jobs = std::thread::hardware_concurrency();
  if (jobs <= 1 || n < 4096) {
    fn(0, n);
    return;
  }
  const std::size_t chunk = (n + jobs - 1) / jobs;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    const std::size_t b = t * chunk;
    if (b >= n) break;
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& th : pool) th.join();
}

struct OutOfBounds : std::runtime_error {
  int axis;
  explicit OutOfBounds(int axis_idx)
      : std::runtime_error("query outside grid bounds on axis " + std::to_string(axis_idx)),
        axis(axis_idx) {}
};

struct GridTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BRTTouchesBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatVersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorruptPayload : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyTrace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cbvf
