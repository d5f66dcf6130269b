#include "pse/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "pse/parallel.hpp"

namespace pse {

namespace {

double window_circumradius(const Window& D) {
  return D.shape == WindowShape::Box ? D.radius * std::sqrt(static_cast<double>(D.dim))
                                     : D.radius;
}

std::vector<Vec> sorted_points(std::vector<Vec> pts, double tol) {
  std::sort(pts.begin(), pts.end(),
            [tol](const Vec& a, const Vec& b) { return lex_less(a, b, tol); });
  return pts;
}

bool point_list_equal(const std::vector<Vec>& a, const std::vector<Vec>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!almost_equal(a[i], b[i], std::max(tol, 1e-12) * 4.0)) return false;
  return true;
}

/// Lexicographic comparison of two sorted coordinate lists.
bool point_list_less(const std::vector<Vec>& a, const std::vector<Vec>& b, double tol) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (lex_less(a[i], b[i], tol)) return true;
    if (lex_less(b[i], a[i], tol)) return false;
  }
  return a.size() < b.size();
}

}  // namespace

Vec Pattern::anchor() const {
  if (points.empty()) throw std::invalid_argument("empty pattern has no anchor");
  Vec best = points[0];
  for (const Vec& p : points)
    if (lex_less(p, best, match_tol())) best = p;
  return best;
}

double Pattern::diameter() const {
  double d2max = 0.0;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      d2max = std::max(d2max, dist2(points[i], points[j]));
  return std::sqrt(d2max);
}

Box Pattern::bounding_box() const {
  Box b;
  b.dim = dim;
  if (points.empty()) return b;
  b.lo = b.hi = points[0];
  for (const Vec& p : points)
    for (int i = 0; i < dim; ++i) {
      b.lo[i] = std::min(b.lo[i], p[i]);
      b.hi[i] = std::max(b.hi[i], p[i]);
    }
  return b;
}

Pattern Pattern::from_points(std::vector<Vec> pts, int dim, double source_r, CoordMode mode,
                             double tol) {
  Pattern q;
  q.points = std::move(pts);
  q.dim = dim;
  q.source_r = source_r;
  q.mode = mode;
  q.tol = tol;
  return q;
}

Pattern Pattern::of_set(const PointSet& P, const std::vector<uint32_t>& ids) {
  std::vector<Vec> pts;
  pts.reserve(ids.size());
  for (uint32_t id : ids) pts.push_back(P.points()[id]);
  return from_points(std::move(pts), P.dim(), P.r(), P.mode(), P.tol());
}

namespace {

CanonicalForm canonical_translation(const Pattern& Q) {
  CanonicalForm cf;
  Vec a = Q.anchor();
  std::vector<Vec> moved;
  moved.reserve(Q.points.size());
  for (const Vec& p : Q.points) moved.push_back(p - a);
  cf.pattern = Q;
  cf.pattern.points = sorted_points(std::move(moved), Q.match_tol());
  cf.witness = GroupElement::translate(-a);
  return cf;
}

/// Candidate rotations for E(2): every ordered nearest-neighbour pair (a, b)
/// defines the turn taking b-a onto the positive x-axis.
std::vector<double> alignment_candidates(const Pattern& Q) {
  std::vector<double> angles;
  double tol = std::max(Q.match_tol(), 1e-12);
  for (size_t i = 0; i < Q.points.size(); ++i) {
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < Q.points.size(); ++j)
      if (j != i) dmin = std::min(dmin, dist(Q.points[i], Q.points[j]));
    for (size_t j = 0; j < Q.points.size(); ++j) {
      if (j == i) continue;
      if (dist(Q.points[i], Q.points[j]) > dmin + 4.0 * tol) continue;
      Vec v = Q.points[j] - Q.points[i];
      angles.push_back(wrap_angle(-std::atan2(v[1], v[0])));
    }
  }
  return angles;
}

CanonicalForm canonical_euclidean2(const Pattern& Q) {
  if (Q.points.size() == 1) {
    CanonicalForm cf;
    cf.pattern = Q;
    cf.pattern.points = {Vec()};
    cf.witness = GroupElement::translate(-Q.points[0]);
    return cf;
  }
  double tol = Q.match_tol();
  CanonicalForm best;
  bool have = false;
  for (double theta : alignment_candidates(Q)) {
    std::vector<Vec> rotated;
    rotated.reserve(Q.points.size());
    for (const Vec& p : Q.points) rotated.push_back(rotate(theta, p));
    Vec m = rotated[0];
    for (const Vec& p : rotated)
      if (lex_less(p, m, tol)) m = p;
    for (Vec& p : rotated) p = p - m;
    rotated = sorted_points(std::move(rotated), tol);
    if (!have || point_list_less(rotated, best.pattern.points, tol)) {
      best.pattern = Q;
      best.pattern.points = std::move(rotated);
      best.witness = GroupElement::rotate_translate(theta, -m);
      have = true;
    }
  }
  return best;
}

}  // namespace

CanonicalForm canonical_form(const Pattern& Q, const GroupSpec& spec) {
  if (Q.points.empty())
    throw std::invalid_argument("empty pattern has no canonical form");
  return spec.rotational() ? canonical_euclidean2(Q) : canonical_translation(Q);
}

EquivalenceResult are_equivalent(const Pattern& Q1, const Pattern& Q2, const GroupSpec& spec) {
  EquivalenceResult res;
  if (Q1.points.size() != Q2.points.size()) return res;
  if (Q1.points.empty()) {
    res.equivalent = true;
    res.witness = GroupElement::identity();
    return res;
  }
  CanonicalForm c1 = canonical_form(Q1, spec);
  CanonicalForm c2 = canonical_form(Q2, spec);
  double tol = std::max(Q1.match_tol(), Q2.match_tol());
  if (!point_list_equal(c1.pattern.points, c2.pattern.points, tol)) return res;
  res.equivalent = true;
  res.witness = compose(inverse(c2.witness), c1.witness);
  return res;
}

namespace {

bool support_contains_open(const SupportShape& V, const Vec& centre, const Vec& p) {
  if (V.shape == WindowShape::Ball) return dist2(p, centre) < V.radius * V.radius;
  for (int i = 0; i < 3; ++i)
    if (!(p[i] > centre[i] - V.radius && p[i] < centre[i] + V.radius)) return false;
  return true;
}

Box support_hull(const SupportShape& V, const Vec& centre, int dim) {
  return Box::of(centre - Vec(V.radius, V.radius, V.radius),
                 centre + Vec(V.radius, V.radius, V.radius), dim);
}

}  // namespace

ExtractedPattern extract_pattern_at(const PointSet& P, const SupportShape& V, const Vec& centre) {
  ExtractedPattern out;
  out.placement = centre;
  std::vector<uint32_t> ids;
  for (uint32_t id : P.in_ball(centre, V.radius * std::sqrt(3.0) + P.tol(), false))
    if (support_contains_open(V, centre, P.points()[id])) ids.push_back(id);
  out.pattern = Pattern::of_set(P, ids);
  out.truncated = !P.window().contains_box(support_hull(V, centre, P.dim()));
  return out;
}

std::vector<ExtractedPattern> extract_patterns(const PointSet& P, const SupportShape& V,
                                               std::optional<size_t> k) {
  std::vector<ExtractedPattern> out;
  std::set<std::vector<uint32_t>> seen;  // dedup for the k-subset listing
  for (const Vec& anchor : P.points()) {
    Vec centre = anchor + V.offset;
    std::vector<uint32_t> ids;
    for (uint32_t id : P.in_ball(centre, V.radius * std::sqrt(3.0) + P.tol(), false))
      if (support_contains_open(V, centre, P.points()[id])) ids.push_back(id);
    bool trunc = !P.window().contains_box(support_hull(V, centre, P.dim()));
    if (!k.has_value()) {
      ExtractedPattern ep;
      ep.pattern = Pattern::of_set(P, ids);
      ep.placement = centre;
      ep.truncated = trunc;
      out.push_back(std::move(ep));
      continue;
    }
    // All cardinality-k subsets of this cut, deduplicated across placements.
    size_t kk = *k;
    if (ids.size() < kk) continue;
    std::vector<size_t> idx(kk);
    for (size_t i = 0; i < kk; ++i) idx[i] = i;
    for (;;) {
      std::vector<uint32_t> sub(kk);
      for (size_t i = 0; i < kk; ++i) sub[i] = ids[idx[i]];
      std::sort(sub.begin(), sub.end());
      if (seen.insert(sub).second) {
        ExtractedPattern ep;
        ep.pattern = Pattern::of_set(P, sub);
        ep.placement = centre;
        ep.truncated = trunc;
        out.push_back(std::move(ep));
      }
      // next combination
      size_t i = kk;
      while (i > 0) {
        --i;
        if (idx[i] != i + ids.size() - kk) break;
        if (i == 0) {
          i = kk;
          break;
        }
      }
      if (i == kk) break;
      ++idx[i];
      for (size_t j = i + 1; j < kk; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

namespace {

/// Collects the matched point indices of x*Q inside P, or nothing if some
/// image point is absent.
std::optional<std::vector<uint32_t>> match_placement(const PointSet& P, const Pattern& Q,
                                                     const GroupElement& x) {
  std::vector<uint32_t> ids;
  ids.reserve(Q.points.size());
  for (const Vec& q : Q.points) {
    auto hit = P.find(act(x, q));
    if (!hit) return std::nullopt;
    ids.push_back(*hit);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool occurrence_truncated(const PointSet& P, const Pattern& Q, const Window& D,
                          const GroupSpec& spec) {
  if (spec.rotational()) {
    double reach = window_circumradius(D) + norm(D.center);
    double qmax = 0.0;
    for (const Vec& q : Q.points) qmax = std::max(qmax, norm(q));
    Box need = Box::centred(reach + qmax, P.dim());
    return !P.window().contains_box(need);
  }
  Box dbox = D.bounding_box();
  Box need = Q.bounding_box().minkowski_sum(Box::of(-dbox.hi, -dbox.lo, P.dim()));
  return !P.window().contains_box(need);
}

}  // namespace

OccurrenceCount count_occurrences(const PointSet& P, const Pattern& Q, const Window& D,
                                  const GroupSpec& spec, int workers) {
  if (Q.points.empty()) throw std::invalid_argument("count_occurrences: empty pattern");
  OccurrenceCount out;
  out.window_index = D.index;
  out.window_volume = haar_volume(D);
  out.truncated = occurrence_truncated(P, Q, D, spec);
  double tol = std::max({P.tol(), Q.match_tol()});

  Vec q0 = Q.anchor();
  std::vector<uint32_t> anchors;
  if (!spec.rotational()) {
    // x = p - q0 must lie in D^{-1}; search the reflected window around q0.
    Vec region_centre = q0 - D.center;
    anchors = P.in_ball(region_centre, window_circumradius(D) + tol, false);
  } else {
    // The rotation part is free, so |x^{-1} translation| is bounded by the
    // window reach around q0.
    Box base = D.shape == WindowShape::Box
                   ? D.bounding_box()
                   : Box::centred(D.radius, D.dim).translated(D.center);
    double dmax = base.max_dist(q0);
    anchors = P.in_ball(Vec(), dmax + tol, false);
  }

  // Reference pair for E(2) rotation candidates: the anchor's nearest
  // neighbour inside Q.
  Vec q1;
  double ref_dist = 0.0;
  if (spec.rotational() && Q.points.size() >= 2) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const Vec& q : Q.points) {
      if (almost_equal(q, q0, tol)) continue;
      double d = dist(q, q0);
      if (d < dmin || (d <= dmin + tol && lex_less(q, q1, tol))) {
        dmin = d;
        q1 = q;
      }
    }
    ref_dist = dmin;
  }

  int w = resolve_workers(workers);
  std::vector<std::vector<std::vector<uint32_t>>> found(static_cast<size_t>(std::max(w, 1)));
  parallel_chunks(anchors.size(), w, [&](int worker, size_t begin, size_t end) {
    auto& local = found[static_cast<size_t>(worker)];
    for (size_t ai = begin; ai < end; ++ai) {
      const Vec& p = P.points()[anchors[ai]];
      if (!spec.rotational()) {
        GroupElement x = GroupElement::translate(p - q0);
        if (!window_inverse_contains(D, x, tol)) continue;
        if (auto ids = match_placement(P, Q, x)) local.push_back(std::move(*ids));
        continue;
      }
      if (Q.points.size() == 1) {
        // Any rotation works; x in D^{-1} iff the circle traced by the
        // inverse translation meets the base.
        Box base = D.shape == WindowShape::Box
                       ? D.bounding_box()
                       : Box::centred(D.radius, D.dim).translated(D.center);
        double rr = norm(p);
        double dmin = D.shape == WindowShape::Ball
                          ? std::max(0.0, dist(q0, D.center) - D.radius)
                          : base.min_dist(q0);
        double dmax = D.shape == WindowShape::Ball ? dist(q0, D.center) + D.radius
                                                   : base.max_dist(q0);
        if (rr >= dmin - tol && rr <= dmax + tol) {
          auto hit = P.find(p);
          if (hit) local.push_back({*hit});
        }
        continue;
      }
      // Rotation candidates from distance-matched neighbour pairs.
      for (uint32_t nb : P.in_ball(p, ref_dist + 4.0 * std::max(tol, 1e-12), false)) {
        const Vec& pp = P.points()[nb];
        double d = dist(p, pp);
        if (std::abs(d - ref_dist) > 4.0 * std::max(tol, 1e-12)) continue;
        Vec u = q1 - q0, v = pp - p;
        double theta = wrap_angle(std::atan2(v[1], v[0]) - std::atan2(u[1], u[0]));
        GroupElement x;
        x.angle = theta;
        x.translation = p - rotate(theta, q0);
        if (!window_inverse_contains(D, x, tol)) continue;
        if (auto ids = match_placement(P, Q, x)) local.push_back(std::move(*ids));
      }
    }
  });

  std::set<std::vector<uint32_t>> distinct;
  for (auto& local : found)
    for (auto& ids : local) distinct.insert(std::move(ids));
  out.count = static_cast<long long>(distinct.size());
  return out;
}

OccurrenceCount count_occurrences_restricted(const PointSet& P, const Pattern& Q,
                                             const Window& D) {
  if (Q.points.empty())
    throw std::invalid_argument("count_occurrences_restricted: empty pattern");
  OccurrenceCount out;
  out.window_index = D.index;
  out.window_volume = haar_volume(D);
  double tol = std::max(P.tol(), Q.match_tol());
  // Region D^{-1}(origin) in the base space is the reflected window base.
  auto in_region = [&](const Vec& m) { return D.contains_translation(-m, tol); };
  out.truncated = !P.window().contains_box(
      Box::centred(window_circumradius(D), P.dim()).translated(-D.center));

  Vec q0 = Q.anchor();
  long long count = 0;
  for (uint32_t id : P.in_ball(-D.center, window_circumradius(D) + tol, false)) {
    const Vec& p = P.points()[id];
    if (!in_region(p)) continue;
    Vec x = p - q0;
    bool all = true;
    for (const Vec& q : Q.points) {
      auto hit = P.find(q + x);
      if (!hit || !in_region(P.points()[*hit])) {
        all = false;
        break;
      }
    }
    if (all) ++count;
  }
  out.count = count;
  return out;
}

FrequencyEstimate pattern_frequency(const PointSet& P, const Pattern& Q,
                                    const WindowSequence& seq, int workers) {
  FrequencyEstimate est;
  std::vector<double> radii;
  bool any_clean = false;
  for (const Window& D : seq.windows) {
    OccurrenceCount oc = count_occurrences(P, Q, D, seq.group, workers);
    est.per_window.push_back(oc);
    est.ratios.push_back(static_cast<double>(oc.count) / oc.window_volume);
    radii.push_back(D.radius);
    if (!oc.truncated) any_clean = true;
  }
  if (!any_clean && !est.per_window.empty())
    throw std::runtime_error("pattern_frequency: all windows truncated");
  if (est.ratios.size() >= 2) {
    est.extrapolated = richardson_extrapolate(radii, est.ratios);
    est.diagnostic = std::abs(est.ratios.back() - est.extrapolated);
  } else if (!est.ratios.empty()) {
    est.extrapolated = est.ratios.back();
  }
  size_t m = est.ratios.size();
  if (m >= 3) {
    double lo = est.ratios[m - 3], hi = lo;
    for (size_t i = m - 3; i < m; ++i) {
      lo = std::min(lo, est.ratios[i]);
      hi = std::max(hi, est.ratios[i]);
    }
    est.oscillation = hi - lo;
  }
  return est;
}

FlcReport flc_enumerate(const PointSet& P, double V_radius, int n_windows,
                        const GroupSpec& spec) {
  if (n_windows < 1) throw std::invalid_argument("flc_enumerate: need at least one window");
  FlcReport rep;
  const Box& W = P.window();
  Vec centre = W.center();
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P.dim(); ++i)
    margin = std::min(margin, 0.5 * (W.hi[i] - W.lo[i]) - V_radius);
  if (margin <= 0.0) throw std::invalid_argument("flc_enumerate: support exceeds window");

  std::vector<Pattern> reps;
  double tol = P.tol();
  for (int win = 1; win <= n_windows; ++win) {
    double a = margin * static_cast<double>(win) / static_cast<double>(n_windows);
    Box anchor_region = Box::centred(a, P.dim()).translated(centre);
    long long anchors = 0;
    for (uint32_t id : P.in_box(anchor_region, false)) {
      ++anchors;
      const Vec& p = P.points()[id];
      std::vector<uint32_t> ids = P.in_ball(p, V_radius, true);
      if (ids.empty()) continue;
      Pattern cut = Pattern::of_set(P, ids);
      CanonicalForm cf = canonical_form(cut, spec);
      bool known = false;
      for (const Pattern& rep_pat : reps) {
        if (rep_pat.points.size() != cf.pattern.points.size()) continue;
        if (point_list_equal(rep_pat.points, cf.pattern.points, std::max(tol, 1e-12))) {
          known = true;
          break;
        }
      }
      if (!known) reps.push_back(cf.pattern);
    }
    FlcWindowRow row;
    row.anchor_radius = a;
    row.anchors = anchors;
    row.classes = static_cast<long long>(reps.size());
    rep.growth.push_back(row);
  }
  rep.class_representatives = reps;
  size_t m = rep.growth.size();
  rep.flc = m >= 2 && rep.growth[m - 1].classes == rep.growth[m - 2].classes;
  return rep;
}

}  // namespace pse
