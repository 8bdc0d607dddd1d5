#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vortexmf {

/// Side length of the periodic domain. Fixed at 2*pi so that Fourier modes
/// carry integer wavevectors and FFT indices coincide with wavevectors.
inline constexpr double kTorusLength = 2.0 * std::numbers::pi;

/// Plain 2-vector for velocities, drifts and noise amplitudes.
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
  constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  friend constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
  Vec2& operator+=(const Vec2& r) {
    x += r.x;
    y += r.y;
    return *this;
  }
  constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
  double norm() const { return std::hypot(x, y); }
  /// Counterclockwise quarter turn: (x, y) -> (-y, x).
  constexpr Vec2 perp() const { return {-y, x}; }
};

/// 2x2 real matrix (row major). Used for covariances and Jacobians.
struct Mat2 {
  double a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};

  constexpr Mat2 operator+(const Mat2& r) const {
    return {a11 + r.a11, a12 + r.a12, a21 + r.a21, a22 + r.a22};
  }
  Mat2& operator+=(const Mat2& r) {
    a11 += r.a11;
    a12 += r.a12;
    a21 += r.a21;
    a22 += r.a22;
    return *this;
  }
  constexpr Vec2 apply(const Vec2& v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  constexpr double trace() const { return a11 + a22; }
  double frobenius() const {
    return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
  }
};

/// A point on the flat torus [0, L)^2. Coordinates are kept reduced.
struct TorusPoint {
  double x1{0.0};
  double x2{0.0};
};

/// Minimal-image difference of two torus points, componentwise in [-L/2, L/2).
struct TorusDisplacement {
  double d1{0.0};
  double d2{0.0};

  constexpr Vec2 vec() const { return {d1, d2}; }
  double norm() const { return std::hypot(d1, d2); }
  constexpr TorusDisplacement operator-() const { return {-d1, -d2}; }
};

namespace detail {

inline double reduce_mod_length(double v) {
  double r = std::fmod(v, kTorusLength);
  if (r < 0.0) r += kTorusLength;
  if (r >= kTorusLength) r = 0.0;
  return r;
}

// Representative of v in [-L/2, L/2); a tie at exactly L/2 resolves to -L/2.
inline double reduce_min_image(double v) {
  double r = v - kTorusLength * std::floor(v / kTorusLength + 0.5);
  if (r >= 0.5 * kTorusLength) r -= kTorusLength;
  if (r < -0.5 * kTorusLength) r += kTorusLength;
  return r;
}

}  // namespace detail

/// Reduce raw coordinates into [0, L)^2. Idempotent. Throws on non-finite input.
inline TorusPoint wrap(double x1, double x2) {
  if (!std::isfinite(x1) || !std::isfinite(x2)) {
    throw std::invalid_argument("wrap: non-finite coordinate");
  }
  return {detail::reduce_mod_length(x1), detail::reduce_mod_length(x2)};
}

/// The representative of p - q with the smallest Euclidean norm.
inline TorusDisplacement min_image(const TorusPoint& p, const TorusPoint& q) {
  return {detail::reduce_min_image(p.x1 - q.x1),
          detail::reduce_min_image(p.x2 - q.x2)};
}

/// Geodesic (minimal-image Euclidean) distance; maximum value is pi*sqrt(2).
inline double torus_dist(const TorusPoint& p, const TorusPoint& q) {
  return min_image(p, q).norm();
}

/// Translate a point by a raw displacement, re-wrapping the result.
inline TorusPoint translate(const TorusPoint& p, const Vec2& v) {
  return wrap(p.x1 + v.x, p.x2 + v.y);
}

/// Uniform periodic n-by-n grid on the torus, spacing h = L/n.
struct TorusGrid {
  int n{0};

  explicit TorusGrid(int n_) : n(n_) {
    if (n <= 0) throw std::invalid_argument("TorusGrid: n must be positive");
  }

  double spacing() const { return kTorusLength / n; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  TorusPoint node(int i, int j) const {
    return {spacing() * i, spacing() * j};
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n + j;
  }
};

}  // namespace vortexmf
