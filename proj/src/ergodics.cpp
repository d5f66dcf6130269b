#include "pse/ergodics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <stdexcept>

#include "pse/parallel.hpp"
#include "pse/rng.hpp"

namespace pse {

double Profile::eval(const Vec& m) const {
  switch (kind) {
    case Kind::IndicatorBox: {
      for (int i = 0; i < 3; ++i)
        if (!(m[i] > center[i] - radius && m[i] < center[i] + radius)) return 0.0;
      return 1.0;
    }
    case Kind::IndicatorBall:
      return dist2(m, center) < radius * radius ? 1.0 : 0.0;
    case Kind::TentBall: {
      double d = dist(m, center);
      return d < radius ? 1.0 - d / radius : 0.0;
    }
  }
  return 0.0;
}

double Profile::support_circumradius(int dim) const {
  return kind == Kind::IndicatorBox ? radius * std::sqrt(static_cast<double>(dim)) : radius;
}

Box Profile::support_hull(int dim) const {
  return Box::of(center - Vec(radius, radius, radius), center + Vec(radius, radius, radius), dim);
}

double Profile::total_integral(int dim) const {
  switch (kind) {
    case Kind::IndicatorBox: return std::pow(2.0 * radius, dim);
    case Kind::IndicatorBall: return ball_volume(radius, dim);
    case Kind::TentBall:
      if (dim == 1) return radius;
      if (dim == 2) return kPi * radius * radius / 3.0;
      return kPi * radius * radius * radius / 3.0;
  }
  return 0.0;
}

bool ScanningFunction::coloured() const {
  for (const Factor& f : factors)
    if (f.psi.has_value()) return true;
  return false;
}

bool ScanningFunction::supports_disjoint(int dim) const {
  for (size_t i = 0; i < factors.size(); ++i)
    for (size_t j = i + 1; j < factors.size(); ++j) {
      Box bi = factors[i].phi.support_hull(dim);
      Box bj = factors[j].phi.support_hull(dim);
      Box inter = bi.intersect(bj);
      bool overlap = true;
      for (int a = 0; a < dim; ++a)
        if (inter.lo[a] >= inter.hi[a]) overlap = false;
      // Conservative for balls: fall back to centre distance.
      if (overlap && factors[i].phi.kind != Profile::Kind::IndicatorBox &&
          factors[j].phi.kind != Profile::Kind::IndicatorBox) {
        overlap = dist(factors[i].phi.center, factors[j].phi.center) <
                  factors[i].phi.radius + factors[j].phi.radius;
      }
      if (overlap) return false;
    }
  return true;
}

namespace {

double factor_sum(const ScanningFunction::Factor& f, const PointSet& P,
                  const std::vector<double>* colours, const GroupElement& x) {
  // Points contributing satisfy x*p in supp(phi), i.e. p in x^{-1} supp.
  GroupElement xi = inverse(x);
  Vec centre = act(xi, f.phi.center);
  double rad = f.phi.support_circumradius(P.dim());
  double acc = 0.0;
  for (uint32_t id : P.in_ball(centre, rad + P.tol(), false)) {
    double v = f.phi.eval(act(x, P.points()[id]));
    if (v == 0.0) continue;
    if (f.psi.has_value()) {
      if (!colours) throw std::invalid_argument("scanning function needs colours");
      v *= f.psi->eval((*colours)[id]);
    }
    acc += v;
  }
  return acc;
}

}  // namespace

double ScanningFunction::eval(const PointSet& P, const GroupElement& x) const {
  if (coloured()) throw std::invalid_argument("coloured scanning function on uncoloured set");
  double prod = 1.0;
  for (const Factor& f : factors) prod *= factor_sum(f, P, nullptr, x);
  return prod;
}

double ScanningFunction::eval(const ColouredPointSet& Pw, const GroupElement& x) const {
  double prod = 1.0;
  for (const Factor& f : factors) prod *= factor_sum(f, Pw.base, &Pw.colours, x);
  return prod;
}

namespace {

GroupElement draw_in_window(const Window& D, const GroupSpec& spec, CounterRng& rng) {
  GroupElement x;
  x.translation = D.shape == WindowShape::Box ? rng.in_box(D.bounding_box())
                                              : rng.in_ball(D.center, D.radius, D.dim);
  if (spec.rotational()) x.angle = rng.angle();
  return x;
}

bool mc_truncated(const PointSet& q, const ScanningFunction& f, const Window& D,
                  const GroupSpec& spec) {
  for (const auto& fac : f.factors) {
    if (spec.rotational()) {
      double reach = (D.shape == WindowShape::Box ? D.radius * std::sqrt(2.0) : D.radius) +
                     norm(D.center);
      double need = reach + norm(fac.phi.center) + fac.phi.support_circumradius(q.dim());
      if (!q.window().contains_box(Box::centred(need, q.dim()))) return true;
    } else {
      Box dbox = D.bounding_box();
      Box need = fac.phi.support_hull(q.dim()).minkowski_sum(
          Box::of(-dbox.hi, -dbox.lo, q.dim()));
      if (!q.window().contains_box(need)) return true;
    }
  }
  return false;
}

template <typename Eval>
BirkhoffEstimate mc_core(const Window& D, const GroupSpec& spec, long long samples,
                         uint64_t seed, int workers, Eval&& eval_at) {
  if (samples <= 0) throw std::invalid_argument("birkhoff_average_mc: samples must be > 0");
  int w = resolve_workers(workers);
  std::vector<double> s1(static_cast<size_t>(std::max(w, 1)), 0.0);
  std::vector<double> s2(static_cast<size_t>(std::max(w, 1)), 0.0);
  parallel_chunks(static_cast<size_t>(samples), w, [&](int worker, size_t begin, size_t end) {
    double a = 0.0, b = 0.0;
    for (size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, 0x3141, i);
      GroupElement x = draw_in_window(D, spec, rng);
      double v = eval_at(x);
      a += v;
      b += v * v;
    }
    s1[static_cast<size_t>(worker)] = a;
    s2[static_cast<size_t>(worker)] = b;
  });
  double sum = 0.0, sum2 = 0.0;
  for (size_t i = 0; i < s1.size(); ++i) {
    sum += s1[i];
    sum2 += s2[i];
  }
  BirkhoffEstimate est;
  est.samples = samples;
  double n = static_cast<double>(samples);
  est.value = sum / n;
  double var = std::max(0.0, sum2 / n - est.value * est.value);
  est.stderr_ = std::sqrt(var / n);
  return est;
}

}  // namespace

BirkhoffEstimate birkhoff_average_mc(const PointSet& q, const ScanningFunction& f,
                                     const Window& D, const GroupSpec& spec, long long samples,
                                     uint64_t seed, int workers) {
  BirkhoffEstimate est = mc_core(D, spec, samples, seed, workers,
                                 [&](const GroupElement& x) { return f.eval(q, x); });
  est.truncated = mc_truncated(q, f, D, spec);
  return est;
}

BirkhoffEstimate birkhoff_average_mc(const ColouredPointSet& q, const ScanningFunction& f,
                                     const Window& D, const GroupSpec& spec, long long samples,
                                     uint64_t seed, int workers) {
  BirkhoffEstimate est = mc_core(D, spec, samples, seed, workers,
                                 [&](const GroupElement& x) { return f.eval(q, x); });
  est.truncated = mc_truncated(q.base, f, D, spec);
  return est;
}

namespace {

/// Midpoint quadrature with grid doubling until the relative change drops
/// below rel_tol (or the refinement cap).
double integrate_over_box(const Box& b, int dim, double rel_tol,
                          const std::function<double(const Vec&)>& f) {
  if (b.volume() <= 0.0) return 0.0;
  double prev = 0.0;
  bool have_prev = false;
  int cells = dim == 1 ? 256 : (dim == 2 ? 48 : 16);
  int cap = dim == 1 ? 1 << 16 : (dim == 2 ? 1536 : 128);
  for (;; cells *= 2) {
    double h[3] = {0, 0, 0};
    int n[3] = {1, 1, 1};
    for (int i = 0; i < dim; ++i) {
      n[i] = cells;
      h[i] = (b.hi[i] - b.lo[i]) / cells;
    }
    double acc = 0.0;
    for (int ix = 0; ix < n[0]; ++ix)
      for (int iy = 0; iy < n[1]; ++iy)
        for (int iz = 0; iz < n[2]; ++iz) {
          Vec m(b.lo[0] + (ix + 0.5) * h[0], dim > 1 ? b.lo[1] + (iy + 0.5) * h[1] : 0.0,
                dim > 2 ? b.lo[2] + (iz + 0.5) * h[2] : 0.0);
          acc += f(m);
        }
    double cell_vol = 1.0;
    for (int i = 0; i < dim; ++i) cell_vol *= h[i];
    acc *= cell_vol;
    if (have_prev && std::abs(acc - prev) <= rel_tol * std::max(std::abs(acc), 1e-300))
      return acc;
    if (cells >= cap) return acc;
    prev = acc;
    have_prev = true;
  }
}

bool window_box_like(const Window& D) { return D.shape == WindowShape::Box; }

double box_overlap_volume(const Box& a, const Box& b, int dim) {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) {
    double e = std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]);
    if (e <= 0.0) return 0.0;
    v *= e;
  }
  return v;
}

}  // namespace

std::vector<double> birkhoff_point_weights(const PointSet& P, const Profile& phi,
                                           const Window& D, bool& truncated, int workers) {
  const int dim = P.dim();
  Box dbox = D.bounding_box();
  Box supp = phi.support_hull(dim);
  Box region = supp.minkowski_sum(Box::of(-dbox.hi, -dbox.lo, dim));
  truncated = !P.window().contains_box(region);

  std::vector<double> w(P.size(), 0.0);
  auto relevant = P.in_box(region.inflated(P.tol() + 1e-12), false);
  parallel_chunks(relevant.size(), workers, [&](int, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      uint32_t id = relevant[i];
      const Vec& p = P.points()[id];
      Box shifted = dbox.translated(p);  // p + D
      bool interior = window_box_like(D)
                          ? shifted.contains_box(supp)
                          : [&] {
                              // every hull corner of supp within the ball p+D
                              double R = D.radius;
                              Vec c = D.center + p;
                              for (int cx = 0; cx < 2; ++cx)
                                for (int cy = 0; cy < (dim > 1 ? 2 : 1); ++cy)
                                  for (int cz = 0; cz < (dim > 2 ? 2 : 1); ++cz) {
                                    Vec corner(cx ? supp.hi[0] : supp.lo[0],
                                               dim > 1 ? (cy ? supp.hi[1] : supp.lo[1]) : 0.0,
                                               dim > 2 ? (cz ? supp.hi[2] : supp.lo[2]) : 0.0);
                                    if (dist(corner, c) > R) return false;
                                  }
                              return true;
                            }();
      if (interior) {
        w[id] = phi.total_integral(dim);
        continue;
      }
      if (phi.kind == Profile::Kind::IndicatorBox && window_box_like(D)) {
        w[id] = box_overlap_volume(shifted, supp, dim);
        continue;
      }
      Box clip = shifted.intersect(supp);
      bool empty = false;
      for (int a = 0; a < dim; ++a)
        if (clip.lo[a] >= clip.hi[a]) empty = true;
      if (empty) continue;
      Vec ball_c = D.center + p;
      w[id] = integrate_over_box(clip, dim, 1e-6, [&](const Vec& y) {
        if (!window_box_like(D) && dist(y, ball_c) > D.radius) return 0.0;
        return phi.eval(y);
      });
    }
  });
  return w;
}

// ---------------------------------------------------------------------------
// Exact decomposition
// ---------------------------------------------------------------------------

namespace {

struct PlacementGeometry {
  std::vector<Profile> profiles;
  int dim;
  bool all_boxes;
  Box union_hull;       // bounding box of all supports
  double outer_diam;    // max distance between points placed in the supports
};

PlacementGeometry placement_geometry(const ScanningFunction& f, int dim) {
  PlacementGeometry g;
  g.dim = dim;
  g.all_boxes = true;
  bool first = true;
  for (const auto& fac : f.factors) {
    g.profiles.push_back(fac.phi);
    if (fac.phi.kind != Profile::Kind::IndicatorBox) g.all_boxes = false;
    Box h = fac.phi.support_hull(dim);
    if (first) {
      g.union_hull = h;
      first = false;
    } else {
      for (int i = 0; i < dim; ++i) {
        g.union_hull.lo[i] = std::min(g.union_hull.lo[i], h.lo[i]);
        g.union_hull.hi[i] = std::max(g.union_hull.hi[i], h.hi[i]);
      }
    }
  }
  g.outer_diam = 0.0;
  for (const Profile& a : g.profiles)
    for (const Profile& b : g.profiles)
      g.outer_diam = std::max(g.outer_diam, dist(a.center, b.center) +
                                                a.support_circumradius(dim) +
                                                b.support_circumradius(dim));
  return g;
}

/// Open placement region of one permutation under translations: the set of
/// x with x + q_i inside support pi(i) for all i. Exact open-box arithmetic
/// when all supports are boxes.
struct PlacementRegion {
  Box box;       // open box when exact
  bool exact = false;
  bool empty = true;
};

PlacementRegion placement_region_boxes(const PlacementGeometry& g,
                                       const std::vector<Vec>& pts,
                                       const std::vector<size_t>& perm) {
  PlacementRegion r;
  r.exact = true;
  Box acc;
  acc.dim = g.dim;
  bool first = true;
  for (size_t i = 0; i < perm.size(); ++i) {
    const Profile& phi = g.profiles[i];
    Box b = Box::of(phi.center - Vec(phi.radius, phi.radius, phi.radius) - pts[perm[i]],
                    phi.center + Vec(phi.radius, phi.radius, phi.radius) - pts[perm[i]], g.dim);
    if (first) {
      acc = b;
      first = false;
    } else {
      acc = acc.intersect(b);
    }
  }
  for (int i = 0; i < g.dim; ++i)
    if (!(acc.lo[i] < acc.hi[i])) return r;
  r.box = acc;
  r.empty = false;
  return r;
}

bool open_box_meets_window(const Box& open_box, const Window& D, double tol) {
  if (D.shape == WindowShape::Box) {
    Box dbox = D.bounding_box();
    for (int i = 0; i < open_box.dim; ++i) {
      if (!(open_box.lo[i] < dbox.hi[i] + tol)) return false;
      if (!(open_box.hi[i] > dbox.lo[i] - tol)) return false;
    }
    return true;
  }
  return open_box.min_dist(D.center) < D.radius + tol;
}

double permutation_integral(const PlacementGeometry& g, const std::vector<Vec>& pts,
                            const std::vector<size_t>& perm) {
  if (g.all_boxes) {
    PlacementRegion r = placement_region_boxes(g, pts, perm);
    return r.empty ? 0.0 : r.box.volume();
  }
  // Quadrature over the intersection of the shifted support hulls.
  Box bbox;
  bbox.dim = g.dim;
  bool first = true;
  for (size_t i = 0; i < perm.size(); ++i) {
    Box h = g.profiles[i].support_hull(g.dim);
    h = h.translated(-pts[perm[i]]);
    if (first) {
      bbox = h;
      first = false;
    } else {
      bbox = bbox.intersect(h);
    }
  }
  for (int i = 0; i < g.dim; ++i)
    if (bbox.lo[i] >= bbox.hi[i]) return 0.0;
  return integrate_over_box(bbox, g.dim, 1e-6, [&](const Vec& x) {
    double prod = 1.0;
    for (size_t i = 0; i < perm.size() && prod != 0.0; ++i)
      prod *= g.profiles[i].eval(pts[perm[i]] + x);
    return prod;
  });
}

bool permutation_feasible_in(const PlacementGeometry& g, const std::vector<Vec>& pts,
                             const std::vector<size_t>& perm, const Window& D, double tol) {
  if (g.all_boxes) {
    PlacementRegion r = placement_region_boxes(g, pts, perm);
    return !r.empty && open_box_meets_window(r.box, D, tol);
  }
  // Scan a coarse grid of the shifted-hull intersection clipped by D.
  Box bbox;
  bbox.dim = g.dim;
  bool first = true;
  for (size_t i = 0; i < perm.size(); ++i) {
    Box h = g.profiles[i].support_hull(g.dim).translated(-pts[perm[i]]);
    if (first) {
      bbox = h;
      first = false;
    } else {
      bbox = bbox.intersect(h);
    }
  }
  Box dbox = D.bounding_box();
  bbox = bbox.intersect(dbox);
  for (int i = 0; i < g.dim; ++i)
    if (bbox.lo[i] >= bbox.hi[i]) return false;
  int n = 24;
  for (int ix = 0; ix <= n; ++ix)
    for (int iy = 0; iy <= (g.dim > 1 ? n : 0); ++iy)
      for (int iz = 0; iz <= (g.dim > 2 ? n : 0); ++iz) {
        Vec x(bbox.lo[0] + (bbox.hi[0] - bbox.lo[0]) * ix / n,
              g.dim > 1 ? bbox.lo[1] + (bbox.hi[1] - bbox.lo[1]) * iy / n : 0.0,
              g.dim > 2 ? bbox.lo[2] + (bbox.hi[2] - bbox.lo[2]) * iz / n : 0.0);
        if (!D.contains_translation(x, tol)) continue;
        double prod = 1.0;
        for (size_t i = 0; i < perm.size() && prod != 0.0; ++i)
          prod *= g.profiles[i].eval(pts[perm[i]] + x);
        if (prod > 0.0) return true;
      }
  return false;
}

std::vector<std::vector<size_t>> all_permutations(size_t k) {
  std::vector<size_t> idx(k);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::vector<std::vector<size_t>> out;
  do {
    out.push_back(idx);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return out;
}

}  // namespace

ExactDecomposition birkhoff_average_exact(const PointSet& P, const ScanningFunction& f,
                                          const Window& D, const GroupSpec& spec, int workers) {
  (void)workers;
  if (spec.rotational())
    throw std::invalid_argument("birkhoff_average_exact: implemented for translation groups");
  if (f.factors.empty()) {
    ExactDecomposition out;
    out.window_volume = haar_volume(D);
    out.integral_sum = out.class_regrouped_sum = out.window_volume;
    out.average = 1.0;
    return out;
  }
  if (f.coloured())
    throw std::invalid_argument("birkhoff_average_exact: expects uncoloured factors");
  if (!f.supports_disjoint(P.dim()))
    throw std::invalid_argument("supports must be disjoint");

  const int dim = P.dim();
  const size_t k = f.factors.size();
  PlacementGeometry geom = placement_geometry(f, dim);
  double tol = P.tol();

  ExactDecomposition out;
  out.window_volume = haar_volume(D);
  Box dbox = D.bounding_box();
  Box reach = geom.union_hull.minkowski_sum(Box::of(-dbox.hi, -dbox.lo, dim));
  out.truncated = !P.window().contains_box(reach);

  auto perms = all_permutations(k);
  auto anchors = P.in_box(reach.inflated(tol + 1e-12), false);

  std::vector<Pattern> class_reps;
  std::vector<double> class_integral;
  std::vector<long long> class_mult;

  std::vector<uint32_t> members;
  for (uint32_t anchor : anchors) {
    const Vec& a = P.points()[anchor];
    // Enumerate subsets with this anchor as lex-min member.
    members.clear();
    for (uint32_t nb : P.in_ball(a, geom.outer_diam + tol, false)) {
      if (nb == anchor) continue;
      if (lex_less(P.points()[nb], a, tol)) continue;
      members.push_back(nb);
    }
    std::sort(members.begin(), members.end());
    if (members.size() + 1 < k) continue;

    std::vector<size_t> choice(k > 0 ? k - 1 : 0);
    std::iota(choice.begin(), choice.end(), size_t{0});
    auto advance = [&]() {
      size_t i = choice.size();
      while (i > 0) {
        --i;
        if (choice[i] != i + members.size() - choice.size()) {
          ++choice[i];
          for (size_t j = i + 1; j < choice.size(); ++j) choice[j] = choice[j - 1] + 1;
          return true;
        }
      }
      return false;
    };

    bool more = true;
    while (more) {
      std::vector<uint32_t> ids{anchor};
      for (size_t c : choice) ids.push_back(members[c]);
      std::vector<Vec> pts;
      pts.reserve(k);
      for (uint32_t id : ids) pts.push_back(P.points()[id]);

      bool pairwise_ok = true;
      for (size_t i = 0; i < pts.size() && pairwise_ok; ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
          if (dist(pts[i], pts[j]) > geom.outer_diam + tol) {
            pairwise_ok = false;
            break;
          }
      if (pairwise_ok) {
        double integral = 0.0;
        bool feasible = false;
        for (const auto& perm : perms) {
          integral += permutation_integral(geom, pts, perm);
          if (!feasible && permutation_feasible_in(geom, pts, perm, D, tol)) feasible = true;
        }
        if (feasible) {
          out.integral_sum += integral;
          out.pattern_count += 1;
          Pattern pat = Pattern::of_set(P, ids);
          CanonicalForm cf = canonical_form(pat, spec);
          bool merged = false;
          for (size_t c = 0; c < class_reps.size(); ++c) {
            if (class_reps[c].points.size() != cf.pattern.points.size()) continue;
            bool same = true;
            for (size_t i = 0; i < cf.pattern.points.size(); ++i)
              if (!almost_equal(class_reps[c].points[i], cf.pattern.points[i],
                                std::max(tol, 1e-12) * 4.0)) {
                same = false;
                break;
              }
            if (same) {
              class_mult[c] += 1;
              merged = true;
              break;
            }
          }
          if (!merged) {
            class_reps.push_back(cf.pattern);
            class_integral.push_back(integral);
            class_mult.push_back(1);
          }
        }
      }
      if (choice.empty()) break;
      more = advance();
    }
  }

  for (size_t c = 0; c < class_reps.size(); ++c) {
    PatternContribution pc;
    pc.representative = class_reps[c];
    pc.placement_integral = class_integral[c];
    pc.multiplicity = class_mult[c];
    out.classes.push_back(pc);
    out.class_regrouped_sum += class_integral[c] * static_cast<double>(class_mult[c]);
  }
  out.average = out.integral_sum / out.window_volume;
  return out;
}

// ---------------------------------------------------------------------------
// Cylinder estimates
// ---------------------------------------------------------------------------

namespace {

long long count_realisable_permutations(const Pattern& Q, double tol) {
  const size_t k = Q.points.size();
  auto perms = all_permutations(k);
  long long card = 0;
  for (const auto& perm : perms) {
    // x q_perm(i) = q_i for all i with the translation fixed by i = 0.
    Vec x = Q.points[0] - Q.points[perm[0]];
    bool ok = true;
    for (size_t i = 0; i < k; ++i)
      if (!almost_equal(Q.points[perm[i]] + x, Q.points[i], std::max(tol, 1e-12))) {
        ok = false;
        break;
      }
    if (ok) ++card;
  }
  return card;
}

double placement_volume_mc(const Pattern& Q, double eps, const GroupSpec& spec, uint64_t seed) {
  // MC volume of {x : xQ inside the union of eps-balls} for E(2).
  double qmax = 0.0;
  for (const Vec& q : Q.points) qmax = std::max(qmax, norm(q));
  double reach = 2.0 * qmax + eps + 0.5;
  Box bbox = Box::centred(reach, Q.dim);
  long long hits = 0;
  const long long n = 400000;
  for (long long i = 0; i < n; ++i) {
    CounterRng rng(seed, 0xD3, static_cast<uint64_t>(i));
    GroupElement x;
    x.translation = rng.in_box(bbox);
    if (spec.rotational()) x.angle = rng.angle();
    bool ok = true;
    for (const Vec& q : Q.points) {
      Vec y = act(x, q);
      bool inside = false;
      for (const Vec& c : Q.points)
        if (dist(y, c) < eps) {
          inside = true;
          break;
        }
      if (!inside) {
        ok = false;
        break;
      }
    }
    if (ok) ++hits;
  }
  return bbox.volume() * static_cast<double>(hits) / static_cast<double>(n);
}

/// Detects a cardinality-k pattern of P fitting the eps-thickening of Q
/// without being equivalent to Q. Witness candidates come from anchor
/// alignment; images must land within 2*eps of distinct reference points.
std::optional<Pattern> find_inequivalent_fit(const PointSet& P, const Pattern& Q, double eps,
                                             const GroupSpec& spec) {
  const size_t k = Q.points.size();
  double diam = Q.diameter() + 2.0 * eps;
  double tol = std::max(P.tol(), 1e-12);
  auto match_cover = [&](const std::vector<Vec>& pts, const GroupElement& x) {
    // injective cover of the eps-balls, permutation search (k <= 6)
    auto perms = all_permutations(k);
    for (const auto& perm : perms) {
      bool ok = true;
      for (size_t i = 0; i < k; ++i)
        if (dist(act(x, pts[i]), Q.points[perm[i]]) > 2.0 * eps) {
          ok = false;
          break;
        }
      if (ok) return true;
    }
    return false;
  };
  // Modest search region: anchors within the central part of the window.
  Box region = P.window().eroded(0.25 * P.window().diameter() / 2.0);
  if (region.empty()) region = P.window();
  for (uint32_t anchor : P.in_box(region, false)) {
    const Vec& a = P.points()[anchor];
    auto nb = P.in_ball(a, diam + tol, false);
    std::vector<uint32_t> cand;
    for (uint32_t id : nb)
      if (id == anchor || !lex_less(P.points()[id], a, tol)) cand.push_back(id);
    if (cand.size() < k) continue;
    std::vector<size_t> choice(k);
    std::iota(choice.begin(), choice.end(), size_t{0});
    // iterate k-combinations of cand containing the anchor
    for (;;) {
      std::vector<Vec> pts;
      bool has_anchor = false;
      for (size_t c : choice) {
        pts.push_back(P.points()[cand[c]]);
        if (cand[c] == anchor) has_anchor = true;
      }
      if (has_anchor) {
        Pattern cand_pat = Pattern::from_points(pts, P.dim(), P.r(), P.mode(), P.tol());
        if (!are_equivalent(cand_pat, Q, spec).equivalent) {
          bool fits = false;
          for (const Vec& qref : Q.points) {
            GroupElement x = GroupElement::translate(qref - pts[0]);
            if (match_cover(pts, x)) {
              fits = true;
              break;
            }
          }
          if (fits) return cand_pat;
        }
      }
      // next combination
      size_t i = k;
      bool moved = false;
      while (i > 0) {
        --i;
        if (choice[i] != i + cand.size() - k) {
          ++choice[i];
          for (size_t j = i + 1; j < k; ++j) choice[j] = choice[j - 1] + 1;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  return std::nullopt;
}

}  // namespace

CylinderReport estimate_cylinder_measure(const PointSet& P, const CylinderSpec& spec,
                                         const WindowSequence& seq, long long mc_samples,
                                         uint64_t seed, int workers) {
  const Pattern& Q = spec.pattern;
  if (Q.points.empty()) throw std::invalid_argument("cylinder: empty pattern");
  if (!(spec.eps > 0.0) || spec.eps >= P.r() / 2.0)
    throw std::invalid_argument("cylinder: eps must lie in (0, r/2)");
  for (size_t i = 0; i < Q.points.size(); ++i)
    for (size_t j = i + 1; j < Q.points.size(); ++j)
      if (dist(Q.points[i], Q.points[j]) < 2.0 * spec.eps)
        throw std::invalid_argument("cylinder: eps-balls must be pairwise disjoint");
  if (auto witness = find_inequivalent_fit(P, Q, spec.eps, seq.group)) {
    std::string msg = "cylinder: inequivalent pattern fits the thickening; witness points:";
    for (const Vec& p : witness->points) {
      msg += " (";
      for (int i = 0; i < witness->dim; ++i)
        msg += std::to_string(p[i]) + (i + 1 < witness->dim ? "," : "");
      msg += ")";
    }
    throw std::runtime_error(msg);
  }

  CylinderReport rep;
  FrequencyEstimate freq = pattern_frequency(P, Q, seq, workers);
  rep.frequency = freq.extrapolated;

  if (!seq.group.rotational()) {
    rep.realisable_permutations = count_realisable_permutations(Q, P.tol());
    rep.placement_volume = static_cast<double>(rep.realisable_permutations) *
                           ball_volume(spec.eps, P.dim());
  } else {
    rep.placement_volume_by_mc = true;
    rep.placement_volume = placement_volume_mc(Q, spec.eps, seq.group, seed ^ 0x9D);
    rep.realisable_permutations = count_realisable_permutations(Q, P.tol());
  }
  rep.product_value = rep.frequency * rep.placement_volume;

  // Direct Birkhoff estimate of the exactly-one-point-per-ball indicator.
  const Window& D = seq.windows.back();
  auto indicator = [&](const GroupElement& x) {
    GroupElement xi = inverse(x);
    for (const Vec& q : Q.points) {
      if (P.count_in_ball(act(xi, q), spec.eps, true) != 1) return 0.0;
    }
    return 1.0;
  };
  BirkhoffEstimate est = mc_core(D, seq.group, mc_samples, seed, workers, indicator);
  rep.direct_estimate = est.value;
  rep.direct_stderr = est.stderr_;
  rep.gap = std::abs(rep.direct_estimate - rep.product_value);
  return rep;
}

ColouredCylinderReport estimate_coloured_cylinder(const PointSet& P, const ColourLaw& law,
                                                  const CylinderSpec& spec,
                                                  const WindowSequence& seq,
                                                  long long colour_trials, uint64_t seed,
                                                  int workers) {
  if (spec.colour_sets.size() != spec.pattern.points.size())
    throw std::invalid_argument("coloured cylinder: one colour set per reference point");
  CylinderSpec uncoloured = spec;
  uncoloured.colour_sets.clear();
  CylinderReport base = estimate_cylinder_measure(P, uncoloured, seq, colour_trials, seed ^ 0x77,
                                                  workers);

  ColouredCylinderReport rep;
  const Window& D = seq.windows.back();
  int w = resolve_workers(workers);
  std::vector<double> s1(static_cast<size_t>(std::max(w, 1)), 0.0);
  std::vector<double> s2(static_cast<size_t>(std::max(w, 1)), 0.0);
  parallel_chunks(static_cast<size_t>(colour_trials), w, [&](int worker, size_t begin, size_t end) {
    double a = 0.0, b = 0.0;
    for (size_t t = begin; t < end; ++t) {
      ColouredPointSet Pw = sample_colours(P, law, CounterRng::key(seed, 0xC7, t));
      CounterRng rng(seed, 0xBEEF, t);
      GroupElement x = draw_in_window(D, seq.group, rng);
      GroupElement xi = inverse(x);
      double v = 1.0;
      for (size_t i = 0; i < spec.pattern.points.size(); ++i) {
        auto ids = P.in_ball(act(xi, spec.pattern.points[i]), spec.eps, true);
        if (ids.size() != 1) {
          v = 0.0;
          break;
        }
        if (spec.colour_sets[i].eval(Pw.colour_of(ids[0])) == 0.0) {
          v = 0.0;
          break;
        }
      }
      a += v;
      b += v * v;
    }
    s1[static_cast<size_t>(worker)] = a;
    s2[static_cast<size_t>(worker)] = b;
  });
  double sum = 0.0, sum2 = 0.0;
  for (size_t i = 0; i < s1.size(); ++i) {
    sum += s1[i];
    sum2 += s2[i];
  }
  double n = static_cast<double>(colour_trials);
  rep.direct_estimate = sum / n;
  double var = std::max(0.0, sum2 / n - rep.direct_estimate * rep.direct_estimate);
  rep.direct_stderr = std::sqrt(var / n);

  if (law.is_iid()) {
    rep.crosscheck_applicable = true;
    double prod = base.product_value;
    for (const ColourProfile& A : spec.colour_sets) prod *= A.expectation(law.marginal);
    rep.crosscheck = prod;
    rep.gap = std::abs(rep.direct_estimate - rep.crosscheck);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Law of large numbers diagnostic and consistency report
// ---------------------------------------------------------------------------

LlnReport lln_gap_diagnostic(const PointSet& P, const ColourLaw& law, const ScanningFunction& f,
                             const WindowSequence& seq, int trials, uint64_t seed, int workers) {
  if (f.factors.size() != 1 || !f.factors[0].psi.has_value())
    throw std::invalid_argument("lln_gap_diagnostic: expects a single colour factor");
  if (seq.group.rotational())
    throw std::invalid_argument("lln_gap_diagnostic: translation groups only");
  const Profile& phi = f.factors[0].phi;
  const ColourProfile& psi = *f.factors[0].psi;

  LlnReport rep;
  std::vector<double> log_vol, log_std;
  for (const Window& D : seq.windows) {
    LlnRow row;
    row.window_index = D.index;
    row.volume = haar_volume(D);
    std::vector<double> wts = birkhoff_point_weights(P, phi, D, row.truncated, workers);

    std::vector<uint32_t> active;
    for (uint32_t i = 0; i < wts.size(); ++i)
      if (wts[i] != 0.0) active.push_back(i);

    std::vector<double> ys(static_cast<size_t>(trials), 0.0);
    parallel_chunks(static_cast<size_t>(trials), workers, [&](int, size_t begin, size_t end) {
      for (size_t t = begin; t < end; ++t) {
        ColouredPointSet Pw = sample_colours(P, law, CounterRng::key(seed, 0x11A, t));
        double acc = 0.0;
        for (uint32_t id : active) acc += wts[id] * psi.eval(Pw.colour_of(id));
        ys[t] = acc / row.volume;
      }
    });
    double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(trials);
    row.mean = mean;

    if (law.is_iid()) {
      double e_psi = psi.expectation(law.marginal);
      double wsum = 0.0, w2sum = 0.0;
      for (uint32_t id : active) {
        wsum += wts[id];
        w2sum += wts[id] * wts[id];
      }
      row.expected = wsum * e_psi / row.volume;
      double var_psi = std::max(0.0, e_psi - e_psi * e_psi);  // indicator-valued psi
      if (psi.kind == ColourProfile::Kind::One) var_psi = 0.0;
      row.predicted_std = std::sqrt(w2sum * var_psi) / row.volume;
    } else {
      row.expected = mean;
    }
    double dev2 = 0.0;
    for (double y : ys) dev2 += (y - row.expected) * (y - row.expected);
    row.deviation_std = std::sqrt(dev2 / static_cast<double>(trials));
    rep.rows.push_back(row);
    if (row.deviation_std > 0.0) {
      log_vol.push_back(std::log(row.volume));
      log_std.push_back(std::log(row.deviation_std));
    }
  }
  // Least-squares slope of log std against log vol.
  if (log_vol.size() >= 2) {
    double mx = std::accumulate(log_vol.begin(), log_vol.end(), 0.0) / log_vol.size();
    double my = std::accumulate(log_std.begin(), log_std.end(), 0.0) / log_std.size();
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < log_vol.size(); ++i) {
      sxx += (log_vol[i] - mx) * (log_vol[i] - mx);
      sxy += (log_vol[i] - mx) * (log_std[i] - my);
    }
    rep.decay_exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return rep;
}

std::vector<ConsistencyRow> ergodic_consistency_report(const PointSet& P,
                                                       const ScanningFunction& f,
                                                       const WindowSequence& seq,
                                                       const std::vector<GroupElement>& translates,
                                                       int workers) {
  if (seq.group.rotational())
    throw std::invalid_argument("ergodic_consistency_report: translation groups only");
  if (f.factors.size() != 1 || f.factors[0].psi.has_value())
    throw std::invalid_argument("ergodic_consistency_report: expects a single plain factor");
  const Profile& phi = f.factors[0].phi;

  std::vector<ConsistencyRow> rows;
  for (const Window& D : seq.windows) {
    ConsistencyRow row;
    row.window_index = D.index;
    row.volume = haar_volume(D);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const GroupElement& x : translates) {
      if (x.angle != 0.0)
        throw std::invalid_argument("ergodic_consistency_report: translations only");
      PointSet shifted = P.translated(x.translation);
      bool trunc = false;
      std::vector<double> wts = birkhoff_point_weights(shifted, phi, D, trunc, workers);
      row.truncated = row.truncated || trunc;
      double avg = std::accumulate(wts.begin(), wts.end(), 0.0) / row.volume;
      lo = std::min(lo, avg);
      hi = std::max(hi, avg);
    }
    row.spread = translates.empty() ? 0.0 : hi - lo;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pse
