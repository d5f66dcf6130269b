#include "pse/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pse/groups.hpp"
#include "pse/rng.hpp"

namespace pse {

namespace {

std::array<Vec, 3> identity_basis() {
  return {Vec(1, 0, 0), Vec(0, 1, 0), Vec(0, 0, 1)};
}

double basis_determinant(const std::array<Vec, 3>& b, int dim) {
  if (dim == 1) return b[0][0];
  if (dim == 2) return b[0][0] * b[1][1] - b[0][1] * b[1][0];
  return b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
         b[1][0] * (b[0][1] * b[2][2] - b[0][2] * b[2][1]) +
         b[2][0] * (b[0][1] * b[1][2] - b[0][2] * b[1][1]);
}

/// Shortest nonzero lattice vector among small integer combinations; good
/// enough for the mildly skewed bases we accept.
double lattice_min_norm(const std::array<Vec, 3>& b, int dim) {
  double best = std::numeric_limits<double>::infinity();
  int range = 3;
  int jlo = dim > 1 ? -range : 0, jhi = dim > 1 ? range : 0;
  int klo = dim > 2 ? -range : 0, khi = dim > 2 ? range : 0;
  for (int i = -range; i <= range; ++i)
    for (int j = jlo; j <= jhi; ++j)
      for (int k = klo; k <= khi; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        Vec v = b[0] * static_cast<double>(i) + b[1] * static_cast<double>(j) +
                b[2] * static_cast<double>(k);
        best = std::min(best, norm(v));
      }
  return best;
}

std::vector<Vec> lattice_points(const std::array<Vec, 3>& basis, int dim, const Box& window) {
  // Conservative integer ranges from the window diameter over the shortest
  // basis vector.
  double reach = 0.5 * window.diameter() + 1.0;
  double shortest = lattice_min_norm(basis, dim);
  long long range = static_cast<long long>(std::ceil(reach / shortest)) + 2;
  std::vector<Vec> pts;
  long long jlo = dim > 1 ? -range : 0, jhi = dim > 1 ? range : 0;
  long long klo = dim > 2 ? -range : 0, khi = dim > 2 ? range : 0;
  for (long long i = -range; i <= range; ++i)
    for (long long j = jlo; j <= jhi; ++j)
      for (long long k = klo; k <= khi; ++k) {
        Vec v = basis[0] * static_cast<double>(i) + basis[1] * static_cast<double>(j) +
                basis[2] * static_cast<double>(k);
        if (window.contains_closed(v)) pts.push_back(v);
      }
  return pts;
}

}  // namespace

ChainResult generate_chain(GeneratorKind kind, long long min_points) {
  bool fib = kind == GeneratorKind::Fibonacci;
  double long_len = fib ? kGoldenRatio : kSilverRatio;
  // Letters: true = long tile (a), false = short tile (b).
  std::vector<bool> word{true};
  while (static_cast<long long>(word.size()) < min_points) {
    std::vector<bool> next;
    next.reserve(word.size() * 3);
    for (bool a : word) {
      if (a) {
        if (fib) {
          next.push_back(true);
          next.push_back(false);
        } else {  // silver: a -> aab
          next.push_back(true);
          next.push_back(true);
          next.push_back(false);
        }
      } else {
        next.push_back(true);
      }
    }
    word.swap(next);
  }

  long long longs = 0, shorts = 0;
  std::vector<Vec> pts;
  pts.reserve(word.size() + 1);
  double x = 0.0;
  pts.push_back(Vec(x));
  for (bool a : word) {
    x += a ? long_len : 1.0;
    pts.push_back(Vec(x));
    if (a)
      ++longs;
    else
      ++shorts;
  }
  // Centre the chain on the origin.
  double shift = -0.5 * x;
  for (Vec& p : pts) p[0] += shift;
  Box window = Box::of(Vec(pts.front()[0]), Vec(pts.back()[0]), 1);
  ChainResult res{PointSet(std::move(pts), 1.0, window, CoordMode::Float), longs, shorts};
  return res;
}

PointSet generate(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::Lattice: {
      auto basis = spec.basis.value_or(identity_basis());
      if (std::abs(basis_determinant(basis, spec.dim)) < 1e-12)
        throw std::invalid_argument("generate: degenerate lattice basis");
      Box window = Box::centred(spec.window_half_extent, spec.dim);
      auto pts = lattice_points(basis, spec.dim, window);
      double r = lattice_min_norm(basis, spec.dim);
      bool integral = !spec.basis.has_value();
      return PointSet(std::move(pts), r, window,
                      integral ? CoordMode::Int : CoordMode::Float);
    }
    case GeneratorKind::Fibonacci:
    case GeneratorKind::SilverChain:
      return generate_chain(spec.kind, spec.length).points;
    case GeneratorKind::GridGraph: {
      Box window = Box::centred(static_cast<double>(spec.grid_n), 2);
      std::vector<Vec> pts;
      for (int i = -spec.grid_n; i <= spec.grid_n; ++i)
        for (int j = -spec.grid_n; j <= spec.grid_n; ++j)
          pts.push_back(Vec(i, j));
      return PointSet(std::move(pts), 1.0, window, CoordMode::Int);
    }
    case GeneratorKind::RotatedUnion: {
      Box window = Box::centred(spec.window_half_extent, 2);
      std::vector<double> angles = spec.angles.empty() ? std::vector<double>{kPi / 4.0}
                                                       : spec.angles;
      std::vector<Vec> pts = lattice_points(identity_basis(), 2, window);
      // Rotate from a larger patch so the window corners stay covered.
      Box enlarged = Box::centred(spec.window_half_extent * std::sqrt(2.0) + 1.0, 2);
      auto wide = lattice_points(identity_basis(), 2, enlarged);
      for (double a : angles)
        for (const Vec& p : wide) {
          Vec q = rotate(a, p);
          if (window.contains_closed(q)) pts.push_back(q);
        }
      // Drop coincident copies (the origin always repeats), then measure the
      // window's minimum gap to declare the discreteness radius.
      std::sort(pts.begin(), pts.end(),
                [](const Vec& u, const Vec& v) { return lex_less(u, v); });
      pts.erase(std::unique(pts.begin(), pts.end(),
                            [](const Vec& u, const Vec& v) { return almost_equal(u, v, 1e-9); }),
                pts.end());
      PointSet probe(pts, 0.5, window, CoordMode::Float);
      double min_gap = std::numeric_limits<double>::infinity();
      for (const Vec& p : pts) {
        for (uint32_t id : probe.in_ball(p, 1.0, false)) {
          double d = dist(probe.points()[id], p);
          if (d > 1e-12) min_gap = std::min(min_gap, d);
        }
      }
      if (!std::isfinite(min_gap)) min_gap = 1.0;
      return PointSet(std::move(pts), min_gap, window, CoordMode::Float);
    }
    case GeneratorKind::JitteredLattice: {
      if (spec.jitter_amplitude < 0.0 || spec.jitter_amplitude >= 0.5)
        throw std::invalid_argument("generate: jitter amplitude must be in [0, 0.5)");
      Box window = Box::centred(spec.window_half_extent, spec.dim);
      Box inner = window.eroded(spec.jitter_amplitude);
      auto base = lattice_points(identity_basis(), spec.dim, inner);
      std::vector<Vec> pts;
      pts.reserve(base.size());
      for (size_t i = 0; i < base.size(); ++i) {
        CounterRng rng(spec.seed, 0x7177E4, static_cast<uint64_t>(i));
        Vec p = base[i];
        for (int c = 0; c < spec.dim; ++c) p[c] += spec.jitter_amplitude * rng.uniform(-1.0, 1.0);
        pts.push_back(p);
      }
      double r = 1.0 - 2.0 * spec.jitter_amplitude;
      return PointSet(std::move(pts), r, window, CoordMode::Float);
    }
  }
  throw std::invalid_argument("generate: unknown generator kind");
}

}  // namespace pse
