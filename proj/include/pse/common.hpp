#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pse {

/// Default matching tolerance for float-mode geometric equality.
inline constexpr double kTolMatch = 1e-9;
inline constexpr double kPi = 3.14159265358979323846;

/// Coordinate handling mode of a point set. Int mode keeps integral
/// coordinates and compares them exactly; Float mode compares with a
/// matching tolerance.
enum class CoordMode { Int, Float };

/// Point in the base space, dimensions 1..3. Unused coordinates stay 0 so
/// distances can always be computed over all three slots.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  Vec(double x, double y = 0.0, double z = 0.0) : c{x, y, z} {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec operator+(const Vec& o) const { return {c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2]}; }
  Vec operator-(const Vec& o) const { return {c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}; }
  Vec operator-() const { return {-c[0], -c[1], -c[2]}; }
  Vec operator*(double s) const { return {c[0] * s, c[1] * s, c[2] * s}; }

  bool operator==(const Vec& o) const { return c == o.c; }
};

inline double dot(const Vec& a, const Vec& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline double dist2(const Vec& a, const Vec& b) { return norm2(a - b); }
inline double dist(const Vec& a, const Vec& b) { return std::sqrt(dist2(a, b)); }

inline bool finite(const Vec& a) {
  return std::isfinite(a.c[0]) && std::isfinite(a.c[1]) && std::isfinite(a.c[2]);
}

/// Lexicographic order with a per-coordinate tolerance. Coordinates within
/// tol are treated as tied and the comparison moves to the next axis. Points
/// of a uniformly discrete set are far apart relative to tol, so this stays
/// a strict weak ordering on the inputs we sort.
inline bool lex_less(const Vec& a, const Vec& b, double tol = 0.0) {
  for (int i = 0; i < 3; ++i) {
    if (a.c[i] < b.c[i] - tol) return true;
    if (a.c[i] > b.c[i] + tol) return false;
  }
  return false;
}

inline bool almost_equal(const Vec& a, const Vec& b, double tol) {
  return dist2(a, b) <= tol * tol;
}

/// Axis-aligned box. Empty when any lo > hi.
struct Box {
  Vec lo, hi;
  int dim = 0;

  static Box centred(double half_extent, int dim) {
    Box b;
    b.dim = dim;
    for (int i = 0; i < dim; ++i) {
      b.lo[i] = -half_extent;
      b.hi[i] = half_extent;
    }
    return b;
  }
  static Box of(const Vec& lo, const Vec& hi, int dim) {
    Box b;
    b.lo = lo;
    b.hi = hi;
    b.dim = dim;
    return b;
  }

  bool empty() const {
    for (int i = 0; i < dim; ++i)
      if (lo[i] > hi[i]) return true;
    return false;
  }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) {
      double e = hi[i] - lo[i];
      if (e <= 0.0) return 0.0;
      v *= e;
    }
    return v;
  }

  Vec center() const {
    Vec m;
    for (int i = 0; i < dim; ++i) m[i] = 0.5 * (lo[i] + hi[i]);
    return m;
  }

  double diameter() const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double e = hi[i] - lo[i];
      if (e > 0.0) s += e * e;
    }
    return std::sqrt(s);
  }

  bool contains_closed(const Vec& p, double tol = 0.0) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] - tol || p[i] > hi[i] + tol) return false;
    return true;
  }

  bool contains_open(const Vec& p) const {
    for (int i = 0; i < dim; ++i)
      if (!(p[i] > lo[i] && p[i] < hi[i])) return false;
    return true;
  }

  /// Closed containment of another box.
  bool contains_box(const Box& inner, double tol = 0.0) const {
    for (int i = 0; i < dim; ++i)
      if (inner.lo[i] < lo[i] - tol || inner.hi[i] > hi[i] + tol) return false;
    return true;
  }

  Box translated(const Vec& t) const { return of(lo + t, hi + t, dim); }

  Box intersect(const Box& o) const {
    Box r;
    r.dim = dim;
    for (int i = 0; i < dim; ++i) {
      r.lo[i] = std::max(lo[i], o.lo[i]);
      r.hi[i] = std::min(hi[i], o.hi[i]);
    }
    return r;
  }

  Box minkowski_sum(const Box& o) const {
    return of(lo + o.lo, hi + o.hi, dim);
  }

  /// Shrink by amount on every side; may come out empty.
  Box eroded(double amount) const {
    Box r = *this;
    for (int i = 0; i < dim; ++i) {
      r.lo[i] += amount;
      r.hi[i] -= amount;
    }
    return r;
  }

  Box inflated(double amount) const { return eroded(-amount); }

  /// Distance from p to the box (0 inside) and to the farthest box point.
  double min_dist(const Vec& p) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double d = std::max({lo[i] - p[i], p[i] - hi[i], 0.0});
      s += d * d;
    }
    return std::sqrt(s);
  }
  double max_dist(const Vec& p) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
      double d = std::max(std::abs(p[i] - lo[i]), std::abs(p[i] - hi[i]));
      s += d * d;
    }
    return std::sqrt(s);
  }
};

/// Volume of the Euclidean ball of given radius in dimension d (1..3).
inline double ball_volume(double radius, int d) {
  switch (d) {
    case 1: return 2.0 * radius;
    case 2: return kPi * radius * radius;
    case 3: return 4.0 / 3.0 * kPi * radius * radius * radius;
    default: throw std::invalid_argument("ball_volume: dimension must be 1..3");
  }
}

/// Packing bound: a set of pairwise distances >= r and diameter <= diam
/// holds at most ceil((diam/r + 1)^d) points.
inline long long packing_point_bound(double diam, double r, int d) {
  return static_cast<long long>(std::ceil(std::pow(diam / r + 1.0, static_cast<double>(d))));
}

}  // namespace pse
