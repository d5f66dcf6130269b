// Independent brute-force oracles for the test suites. Everything here
// recomputes expected values from first principles and must stay free of the
// library's matching/counting code paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "pse/colouring.hpp"
#include "pse/ergodics.hpp"
#include "pse/geometry.hpp"
#include "pse/groups.hpp"
#include "pse/patterns.hpp"

namespace oracles {

using pse::Box;
using pse::Vec;

inline long long brute_ball_count(const std::vector<Vec>& pts, const Vec& c, double radius,
                                  bool open) {
  long long n = 0;
  for (const Vec& p : pts) {
    double d = pse::dist(p, c);
    if (open ? d < radius : d <= radius) ++n;
  }
  return n;
}

inline double brute_min_pairwise(const std::vector<Vec>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      best = std::min(best, pse::dist(pts[i], pts[j]));
  return best;
}

/// Direct epsilon-scan of the point-set metric on a finite grid of epsilons.
inline double brute_hull_distance(const std::vector<Vec>& P, const std::vector<Vec>& Q,
                                  const Vec& ref, double eps_step = 1e-4) {
  auto agree = [&](double eps) {
    double probe = 1.0 / eps;
    for (const Vec& p : P) {
      if (pse::dist(p, ref) >= probe) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& q : Q) best = std::min(best, pse::dist(p, q));
      if (!(best < eps)) return false;
    }
    for (const Vec& q : Q) {
      if (pse::dist(q, ref) >= probe) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const Vec& p : P) best = std::min(best, pse::dist(q, p));
      if (!(best < eps)) return false;
    }
    return true;
  };
  for (double eps = eps_step; eps < 0.7072; eps += eps_step)
    if (agree(eps)) return eps;
  return 1.0 / std::sqrt(2.0);
}

/// 2x2 rotation matrix applied explicitly (oracle for the group action).
inline Vec matrix_rotate(double angle, const Vec& v) {
  double c = std::cos(angle), s = std::sin(angle);
  return Vec(c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]);
}

/// Exhaustive subset enumeration of occurrences for translation groups:
/// counts subsets Qt of P with Qt = x + Q for some x with -x in the window
/// base (closed membership, slack tol).
inline long long brute_occurrences_translation(const std::vector<Vec>& P,
                                               const std::vector<Vec>& Q,
                                               const pse::Window& D, double tol) {
  const size_t k = Q.size();
  std::vector<size_t> idx(k);
  long long count = 0;
  std::function<void(size_t, size_t)> rec = [&](size_t pos, size_t start) {
    if (pos == k) {
      // Try to match the subset as an ordered translate under some pairing:
      // sort both by lex order; a translation preserves lex order.
      std::vector<Vec> sub;
      for (size_t i : idx) sub.push_back(P[i]);
      std::sort(sub.begin(), sub.end(), [](const Vec& a, const Vec& b) {
        return pse::lex_less(a, b);
      });
      std::vector<Vec> qs = Q;
      std::sort(qs.begin(), qs.end(), [](const Vec& a, const Vec& b) {
        return pse::lex_less(a, b);
      });
      Vec x = sub[0] - qs[0];
      for (size_t i = 0; i < k; ++i)
        if (!pse::almost_equal(qs[i] + x, sub[i], std::max(tol, 1e-12))) return;
      if (!pse::window_inverse_contains(D, pse::GroupElement::translate(x), tol)) return;
      ++count;
      return;
    }
    for (size_t i = start; i < P.size(); ++i) {
      idx[pos] = i;
      rec(pos + 1, i + 1);
    }
  };
  rec(0, 0);
  return count;
}

/// Quarter-turn oracle for E(2) on integer geometry: occurrences of Q under
/// rotations in {0, pi/2, pi, 3pi/2} with any translation, window membership
/// via the inverse element.
inline long long brute_occurrences_quarter_turns(const std::vector<Vec>& P,
                                                 const std::vector<Vec>& Q,
                                                 const pse::Window& D, double tol) {
  std::set<std::vector<int>> distinct;  // keyed on sorted indices into P
  auto find_idx = [&](const Vec& v) -> int {
    for (size_t i = 0; i < P.size(); ++i)
      if (pse::almost_equal(P[i], v, std::max(tol, 1e-9))) return static_cast<int>(i);
    return -1;
  };
  for (int turn = 0; turn < 4; ++turn) {
    double theta = turn * pse::kPi / 2.0;
    for (const Vec& target : P) {
      for (const Vec& q0 : Q) {
        // x rotates by theta and sends q0 to target
        Vec t = target - matrix_rotate(theta, q0);
        pse::GroupElement x{t, pse::wrap_angle(theta)};
        if (!pse::window_inverse_contains(D, x, tol)) continue;
        std::vector<int> ids;
        bool ok = true;
        for (const Vec& q : Q) {
          int id = find_idx(pse::act(x, q));
          if (id < 0) {
            ok = false;
            break;
          }
          ids.push_back(id);
        }
        if (!ok) continue;
        std::sort(ids.begin(), ids.end());
        distinct.insert(ids);
      }
    }
  }
  return static_cast<long long>(distinct.size());
}

/// Perron proportions of the substitution count matrix [[1,1],[1,0]] by
/// power iteration (fractions of long and short tiles).
struct FibonacciOracle {
  double frac_long = 0.0, frac_short = 0.0;
  double mean_tile = 0.0;
  double point_density = 0.0;
  double freq_short_gap = 0.0;  // two-point pattern at the short distance
  double freq_long_gap = 0.0;
};

inline FibonacciOracle fibonacci_frequencies(double long_len) {
  double a = 1.0, b = 1.0;
  for (int it = 0; it < 400; ++it) {
    double na = a + b, nb = a;
    double norm = na + nb;
    a = na / norm;
    b = nb / norm;
  }
  FibonacciOracle o;
  o.frac_long = a;
  o.frac_short = b;
  o.mean_tile = long_len * a + 1.0 * b;
  o.point_density = 1.0 / o.mean_tile;
  o.freq_short_gap = o.frac_short * o.point_density;
  o.freq_long_gap = o.frac_long * o.point_density;
  return o;
}

/// Riemann midpoint integral of x -> prod_i f_{phi_i}(x + P) over the window
/// box. With integer-aligned boxes the integrand is constant on half-integer
/// cells, so pitch 0.5 evaluates the integral exactly.
inline double grid_integral_product(const pse::PointSet& P, const pse::ScanningFunction& f,
                                    const pse::Window& D, double pitch) {
  Box b = D.bounding_box();
  int dim = P.dim();
  long long n[3] = {1, 1, 1};
  for (int i = 0; i < dim; ++i)
    n[i] = std::llround((b.hi[i] - b.lo[i]) / pitch);
  double cell = std::pow(pitch, dim);
  double acc = 0.0;
  for (long long ix = 0; ix < n[0]; ++ix)
    for (long long iy = 0; iy < n[1]; ++iy)
      for (long long iz = 0; iz < n[2]; ++iz) {
        pse::GroupElement x;
        x.translation = Vec(b.lo[0] + (ix + 0.5) * pitch,
                            dim > 1 ? b.lo[1] + (iy + 0.5) * pitch : 0.0,
                            dim > 2 ? b.lo[2] + (iz + 0.5) * pitch : 0.0);
        acc += f.eval(P, x) * cell;
      }
  return acc;
}

/// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    double fa = static_cast<double>(i) / a.size();
    double fb = static_cast<double>(j) / b.size();
    d = std::max(d, std::abs(fa - fb));
  }
  double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::min(1.0, std::max(0.0, p));
}

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double stddev_of(const std::vector<double>& xs) {
  double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

inline double corr_of(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = mean_of(xs), my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracles
