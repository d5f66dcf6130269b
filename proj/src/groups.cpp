#include "pse/groups.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pse/rng.hpp"

namespace pse {

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  if (a >= 2.0 * kPi) a = 0.0;
  return a;
}

namespace {
double snap_trig(double v) {
  if (std::abs(v) < 1e-15) return 0.0;
  if (std::abs(v - 1.0) < 1e-15) return 1.0;
  if (std::abs(v + 1.0) < 1e-15) return -1.0;
  return v;
}
}  // namespace

Vec rotate(double angle, const Vec& v) {
  double c = snap_trig(std::cos(angle));
  double s = snap_trig(std::sin(angle));
  return Vec(c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]);
}

Vec act(const GroupElement& g, const Vec& m) {
  if (g.angle == 0.0) return m + g.translation;
  return rotate(g.angle, m) + g.translation;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  GroupElement r;
  r.angle = wrap_angle(g.angle + h.angle);
  r.translation = rotate(g.angle, h.translation) + g.translation;
  return r;
}

GroupElement inverse(const GroupElement& g) {
  GroupElement r;
  r.angle = wrap_angle(-g.angle);
  r.translation = -rotate(r.angle, g.translation);
  return r;
}

Box Window::bounding_box() const {
  Box b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = center[i] - radius;
    b.hi[i] = center[i] + radius;
  }
  return b;
}

bool Window::contains_translation(const Vec& t, double tol) const {
  if (shape == WindowShape::Box) return bounding_box().contains_closed(t, tol);
  return dist(t, center) <= radius + tol;
}

double haar_volume(const Window& W) {
  if (W.shape == WindowShape::Box) {
    double v = 1.0;
    for (int i = 0; i < W.dim; ++i) v *= 2.0 * W.radius;
    return v;
  }
  return ball_volume(W.radius, W.dim);
}

bool window_contains(const Window& D, const GroupElement& x, double tol) {
  if (x.angle != 0.0 && !D.full_rotations) return false;
  return D.contains_translation(x.translation, tol);
}

bool window_inverse_contains(const Window& D, const GroupElement& x, double tol) {
  return window_contains(D, inverse(x), tol);
}

WindowSequence WindowSequence::make(const GroupSpec& spec, WindowShape shape,
                                    const std::vector<double>& radii) {
  if (spec.rotational() && shape != WindowShape::Ball)
    throw std::invalid_argument("WindowSequence: E(2) windows use ball bases");
  WindowSequence seq;
  seq.group = spec;
  double prev = 0.0;
  int n = 1;
  for (double r : radii) {
    if (r <= prev) throw std::invalid_argument("WindowSequence: radii must increase");
    prev = r;
    Window w = shape == WindowShape::Box ? Window::box(r, spec.dim, n) : Window::ball(r, spec.dim, n);
    w.full_rotations = spec.rotational();
    seq.windows.push_back(w);
    ++n;
  }
  return seq;
}

namespace {

// Van Hove boundary volume for a centred box D and compact box K (both given
// as intervals per axis), via exact Minkowski interval arithmetic:
//   outer = (K+D) \ interior(D)    has volume vol(K+D) - vol((K+D) cap D)
//   inner = (K + closure(D^c)) cap D = D \ erosion, with the erosion of D by
//   -K equal to prod_i (lo_i + khi_i, hi_i + klo_i).
double box_boundary_volume(const Box& D, const Box& K) {
  Box sum = D.minkowski_sum(K);
  double outer = sum.volume() - sum.intersect(D).volume();
  Box erosion;
  erosion.dim = D.dim;
  for (int i = 0; i < D.dim; ++i) {
    erosion.lo[i] = D.lo[i] + K.hi[i];
    erosion.hi[i] = D.hi[i] + K.lo[i];
  }
  double inner = D.volume() - std::max(0.0, erosion.intersect(D).volume());
  return outer + inner;
}

double box_folner_volume(const Box& D, const Box& K) {
  // delta^K D = (KD)\D cup (KD)^c\D^c; the second part is D \ (K+D), empty
  // whenever 0 in K, and in general D minus the sum box.
  Box sum = D.minkowski_sum(K);
  double part1 = sum.volume() - sum.intersect(D).volume();
  double part2 = D.volume() - sum.intersect(D).volume();
  return part1 + part2;
}

// Pointwise membership in the van Hove boundary of a centred ball D of
// radius R: x in K+D iff min dist from x-K to the origin is <= R, and
// x in K+closure(D^c) iff the farthest point of x-K from the origin is >= R.
// Both distances are exact for box and ball K.
bool in_ball_boundary(const Vec& x, double R, const Window& K, bool folner) {
  double dmin, dmax;
  if (K.shape == WindowShape::Ball) {
    double dc = dist(x, K.center);
    dmin = std::max(0.0, dc - K.radius);
    dmax = dc + K.radius;
  } else {
    Box kb = K.bounding_box();
    Box xK;  // x - K
    xK.dim = K.dim;
    for (int i = 0; i < K.dim; ++i) {
      xK.lo[i] = x[i] - kb.hi[i];
      xK.hi[i] = x[i] - kb.lo[i];
    }
    dmin = xK.min_dist(Vec());
    dmax = xK.max_dist(Vec());
  }
  bool in_KD = dmin <= R;
  double rx = norm(x);
  if (folner) {
    bool part1 = in_KD && rx > R;
    bool part2 = !in_KD && rx <= R;
    return part1 || part2;
  }
  bool part1 = in_KD && rx >= R;
  bool part2 = dmax >= R && rx <= R;
  return part1 || part2;
}

double ball_boundary_volume(const Window& D, const Window& K, bool folner) {
  // Midpoint grid over the bounding box of K+D, fine enough for relative
  // error <= 1e-3 of vol(D).
  double reach = D.radius + 2.0 * K.radius + norm(K.center) + 1.0;
  int cells_per_axis = 600;
  if (D.dim == 3) cells_per_axis = 120;
  double h = 2.0 * reach / cells_per_axis;
  double cell_vol = std::pow(h, D.dim);
  double acc = 0.0;
  int ny = D.dim > 1 ? cells_per_axis : 1;
  int nz = D.dim > 2 ? cells_per_axis : 1;
  for (int ix = 0; ix < cells_per_axis; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      for (int iz = 0; iz < nz; ++iz) {
        Vec x(-reach + (ix + 0.5) * h, D.dim > 1 ? -reach + (iy + 0.5) * h : 0.0,
              D.dim > 2 ? -reach + (iz + 0.5) * h : 0.0);
        if (in_ball_boundary(x, D.radius, K, folner)) acc += cell_vol;
      }
  return acc;
}

double boundary_ratio(const WindowSequence& seq, const Window& K, int n, bool folner) {
  if (n < 1 || n > static_cast<int>(seq.windows.size()))
    throw std::invalid_argument("boundary ratio: window index out of range");
  const Window& D = seq.windows[static_cast<size_t>(n - 1)];
  // With the full SO(2) factor on both sides, K D_n reduces to K_t + D_n for
  // rotation-invariant bases, so only K's translation part matters.
  double vol = haar_volume(D);
  if (D.shape == WindowShape::Box) {
    Box Kbox = K.bounding_box();
    double b = folner ? box_folner_volume(D.bounding_box(), Kbox)
                      : box_boundary_volume(D.bounding_box(), Kbox);
    return b / vol;
  }
  return ball_boundary_volume(D, K, folner) / vol;
}

}  // namespace

double van_hove_ratio(const WindowSequence& seq, const Window& K, int n) {
  return boundary_ratio(seq, K, n, false);
}

double folner_ratio(const WindowSequence& seq, const Window& K, int n) {
  return boundary_ratio(seq, K, n, true);
}

std::vector<double> shulman_ratios(const WindowSequence& seq, int n_max) {
  if (n_max < 1 || n_max > static_cast<int>(seq.windows.size()))
    throw std::invalid_argument("shulman_ratios: n_max out of range");
  std::vector<double> out;
  out.push_back(1.0);  // empty union handled as D_1
  for (int n = 2; n <= n_max; ++n) {
    const Window& Dn = seq.windows[static_cast<size_t>(n - 1)];
    // Centred boxes/balls are symmetric and nested, so the union over k < n
    // of D_k^{-1} D_n is realised at k = n-1 with radius r_{n-1} + r_n.
    const Window& Dk = seq.windows[static_cast<size_t>(n - 2)];
    double grown = Dk.radius + Dn.radius;
    double volU = Dn.shape == WindowShape::Box
                      ? std::pow(2.0 * grown, Dn.dim)
                      : ball_volume(grown, Dn.dim);
    out.push_back(volU / haar_volume(Dn));
  }
  return out;
}

double shulman_constant(const WindowSequence& seq, int n_max) {
  auto ratios = shulman_ratios(seq, n_max);
  return *std::max_element(ratios.begin(), ratios.end());
}

UnimodularityReport unimodularity_check(const GroupSpec& spec, int trials, uint64_t seed,
                                        int samples_per_trial) {
  UnimodularityReport rep;
  for (int t = 0; t < trials; ++t) {
    CounterRng shape_rng(seed, 0xA11, static_cast<uint64_t>(t));
    // Random product set S: a translation box (possibly degenerate), and for
    // E(2) an angular arc.
    Box S;
    S.dim = spec.dim;
    for (int i = 0; i < spec.dim; ++i) {
      double a = shape_rng.uniform(-3.0, 3.0);
      double b = shape_rng.uniform(-3.0, 3.0);
      S.lo[i] = std::min(a, b);
      S.hi[i] = std::max(a, b);
    }
    double arc_lo = 0.0, arc_hi = 0.0;
    if (spec.rotational()) {
      arc_lo = shape_rng.uniform(0.0, 2.0 * kPi);
      arc_hi = arc_lo + shape_rng.uniform(0.0, 2.0 * kPi - arc_lo);
    }
    auto in_S = [&](const GroupElement& x) {
      if (spec.rotational() && !(x.angle >= arc_lo && x.angle <= arc_hi)) return false;
      return S.contains_closed(x.translation);
    };
    // Common sampling region covering S and S^{-1} translation parts. The
    // cloud is kept symmetric under (t, a) -> (-t, -a), which makes the two
    // estimates coincide exactly for translation groups (inversion is then
    // point reflection) while staying unbiased for E(2).
    double reach = std::max(S.max_dist(Vec()), 1e-9);
    Box W;
    W.dim = spec.dim;
    for (int i = 0; i < spec.dim; ++i) {
      W.lo[i] = -reach;
      W.hi[i] = reach;
    }
    double wvol = W.volume();
    long long hits_S = 0, hits_Sinv = 0;
    CounterRng rng(seed, 0xB22, static_cast<uint64_t>(t));
    for (int s = 0; s < samples_per_trial / 2; ++s) {
      GroupElement x;
      x.translation = rng.in_box(W);
      if (spec.rotational()) x.angle = rng.angle();
      GroupElement mirrored{-x.translation, wrap_angle(-x.angle)};
      for (const GroupElement& c : {x, mirrored}) {
        if (in_S(c)) ++hits_S;
        if (in_S(inverse(c))) ++hits_Sinv;
      }
    }
    double ns = static_cast<double>(2 * (samples_per_trial / 2));
    double vS = wvol * static_cast<double>(hits_S) / ns;
    double vSinv = wvol * static_cast<double>(hits_Sinv) / ns;
    double p = std::max(static_cast<double>(hits_S), 1.0) / ns;
    double sigma = wvol * std::sqrt(p * (1.0 - p) / ns);
    double gap = std::abs(vS - vSinv);
    double denom = std::max(std::max(vS, vSinv), 1e-12);
    rep.max_relative_gap = std::max(rep.max_relative_gap, gap / denom);
    if (sigma > 0.0) rep.max_sigma_gap = std::max(rep.max_sigma_gap, gap / sigma);
  }
  return rep;
}

double richardson_extrapolate(const std::vector<double>& radii,
                              const std::vector<double>& values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw std::invalid_argument("richardson_extrapolate: need two matched samples");
  size_t m = radii.size();
  double n1 = radii[m - 2], n2 = radii[m - 1];
  double y1 = values[m - 2], y2 = values[m - 1];
  return (n2 * y2 - n1 * y1) / (n2 - n1);
}

}  // namespace pse
