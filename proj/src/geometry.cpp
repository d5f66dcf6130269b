#include "pse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pse {

namespace {
constexpr int64_t kCellOffset = 1 << 20;  // supports coordinates up to ~1e6 cells

int64_t pack_cells(int64_t cx, int64_t cy, int64_t cz) {
  return ((cx + kCellOffset) << 42) | ((cy + kCellOffset) << 21) | (cz + kCellOffset);
}
}  // namespace

int64_t GridIndex::cell_key(const Vec& p) const {
  int64_t cx = static_cast<int64_t>(std::floor(p[0] / cell_));
  int64_t cy = dim_ > 1 ? static_cast<int64_t>(std::floor(p[1] / cell_)) : 0;
  int64_t cz = dim_ > 2 ? static_cast<int64_t>(std::floor(p[2] / cell_)) : 0;
  return pack_cells(cx, cy, cz);
}

void GridIndex::insert(const Vec& p, uint32_t id) {
  for (int i = 0; i < dim_; ++i) {
    int64_t c = static_cast<int64_t>(std::floor(p[i] / cell_));
    if (!any_) {
      cell_lo_[i] = cell_hi_[i] = c;
    } else {
      cell_lo_[i] = std::min(cell_lo_[i], c);
      cell_hi_[i] = std::max(cell_hi_[i], c);
    }
  }
  any_ = true;
  cells_[cell_key(p)].push_back(id);
}

void GridIndex::candidates_in_ball(const Vec& center, double radius,
                                   std::vector<uint32_t>& out) const {
  out.clear();
  if (radius < 0.0 || !any_) return;
  int64_t clo[3] = {0, 0, 0}, chi[3] = {0, 0, 0};
  for (int i = 0; i < dim_; ++i) {
    clo[i] = std::max(cell_lo_[i],
                      static_cast<int64_t>(std::floor((center[i] - radius) / cell_)) - 1);
    chi[i] = std::min(cell_hi_[i],
                      static_cast<int64_t>(std::floor((center[i] + radius) / cell_)) + 1);
    if (clo[i] > chi[i]) return;
  }
  for (int64_t cx = clo[0]; cx <= chi[0]; ++cx)
    for (int64_t cy = clo[1]; cy <= chi[1]; ++cy)
      for (int64_t cz = clo[2]; cz <= chi[2]; ++cz) {
        auto it = cells_.find(pack_cells(cx, cy, cz));
        if (it == cells_.end()) continue;
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
}

PointSet::PointSet(std::vector<Vec> points, double r, Box window, CoordMode mode, double tol)
    : pts_(std::move(points)), r_(r), tol_(tol), mode_(mode), window_(window) {
  if (r_ <= 0.0) throw std::invalid_argument("PointSet: discreteness radius must be > 0");
  if (window_.dim < 1 || window_.dim > 3)
    throw std::invalid_argument("PointSet: dimension must be 1..3");
  double slack = this->tol();
  for (const Vec& p : pts_) {
    if (!finite(p)) throw std::invalid_argument("PointSet: non-finite coordinate");
    if (!window_.contains_closed(p, slack + 1e-12))
      throw std::invalid_argument("PointSet: point outside window");
  }
  index_ = GridIndex(r_ / std::sqrt(static_cast<double>(dim())), dim());
  for (uint32_t i = 0; i < pts_.size(); ++i) index_.insert(pts_[i], i);
}

std::vector<uint32_t> PointSet::in_ball(const Vec& center, double radius, bool open) const {
  std::vector<uint32_t> cand;
  index_.candidates_in_ball(center, radius + tol(), cand);
  std::vector<uint32_t> out;
  out.reserve(cand.size());
  double slack = tol();
  for (uint32_t id : cand) {
    double d2 = dist2(pts_[id], center);
    bool in = open ? d2 < radius * radius
                   : d2 <= (radius + slack) * (radius + slack);
    if (in) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

long long PointSet::count_in_ball(const Vec& center, double radius, bool open) const {
  return static_cast<long long>(in_ball(center, radius, open).size());
}

std::vector<uint32_t> PointSet::in_box(const Box& box, bool open) const {
  Vec c = box.center();
  double rad = 0.5 * box.diameter();
  std::vector<uint32_t> cand;
  index_.candidates_in_ball(c, rad + tol(), cand);
  std::vector<uint32_t> out;
  double slack = tol();
  for (uint32_t id : cand) {
    bool in = open ? box.contains_open(pts_[id]) : box.contains_closed(pts_[id], slack);
    if (in) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<uint32_t> PointSet::find(const Vec& q) const {
  std::vector<uint32_t> cand;
  double eps = mode_ == CoordMode::Int ? 1e-12 : tol_;
  index_.candidates_in_ball(q, eps, cand);
  for (uint32_t id : cand) {
    if (mode_ == CoordMode::Int) {
      if (pts_[id] == q) return id;
    } else if (almost_equal(pts_[id], q, tol_)) {
      return id;
    }
  }
  return std::nullopt;
}

double PointSet::nearest_distance(const Vec& q, double max_dist) const {
  std::vector<uint32_t> cand;
  index_.candidates_in_ball(q, max_dist, cand);
  double best = std::numeric_limits<double>::infinity();
  for (uint32_t id : cand) best = std::min(best, dist(pts_[id], q));
  return best;
}

PointSet PointSet::translated(const Vec& t) const {
  std::vector<Vec> moved;
  moved.reserve(pts_.size());
  for (const Vec& p : pts_) moved.push_back(p + t);
  return PointSet(std::move(moved), r_, window_.translated(t), mode_, tol_);
}

BallCount contains_ball_point(const PointSet& P, const Vec& center, double radius, bool open) {
  if (radius < 0.0) throw std::invalid_argument("contains_ball_point: radius must be >= 0");
  BallCount out;
  out.count = P.count_in_ball(center, radius, open);
  Box hull = Box::of(center - Vec(radius, radius, radius), center + Vec(radius, radius, radius),
                     P.dim());
  out.truncated = !P.window().contains_box(hull);
  return out;
}

DiscretenessReport verify_uniform_discreteness(const PointSet& P) {
  DiscretenessReport rep;
  rep.min_distance = std::numeric_limits<double>::infinity();
  const auto& pts = P.points();
  double r = P.r();
  double r2 = r * r;
  for (uint32_t i = 0; i < pts.size(); ++i) {
    // Neighbours strictly closer than r violate; the closed r-ball scan also
    // records the minimum observed gap.
    for (uint32_t j : P.in_ball(pts[i], r, false)) {
      if (j == i) continue;
      double d2 = dist2(pts[i], pts[j]);
      rep.min_distance = std::min(rep.min_distance, std::sqrt(d2));
      if (d2 < r2 && rep.ok) {
        rep.ok = false;
        rep.witness_a = pts[std::min(i, j)];
        rep.witness_b = pts[std::max(i, j)];
      }
    }
  }
  if (rep.ok) rep.min_distance = std::max(rep.min_distance, r);
  return rep;
}

namespace {

/// Deep-hole candidates: perpendicular-bisector intersections of nearby
/// point tuples (segment midpoints in 1D, circumcentres of triangles in 2D,
/// circumcentres of tetrahedra in 3D). These are the local maxima of the
/// distance-to-P function away from the window boundary.
void collect_vertex_candidates(const PointSet& P, double R, std::vector<Vec>& out) {
  const auto& pts = P.points();
  const int d = P.dim();
  for (uint32_t i = 0; i < pts.size(); ++i) {
    auto neigh = P.in_ball(pts[i], 2.0 * R, false);
    if (d == 1) {
      for (uint32_t j : neigh) {
        if (j <= i) continue;
        out.push_back((pts[i] + pts[j]) * 0.5);
      }
    } else if (d == 2) {
      for (size_t a = 0; a < neigh.size(); ++a) {
        for (size_t b = a + 1; b < neigh.size(); ++b) {
          uint32_t j = neigh[a], k = neigh[b];
          if (j <= i || k <= i) continue;
          const Vec &p1 = pts[i], &p2 = pts[j], &p3 = pts[k];
          double det = 2.0 * ((p2[0] - p1[0]) * (p3[1] - p1[1]) -
                              (p3[0] - p1[0]) * (p2[1] - p1[1]));
          if (std::abs(det) < 1e-12) continue;
          double s2 = norm2(p2) - norm2(p1);
          double s3 = norm2(p3) - norm2(p1);
          Vec c;
          c[0] = (s2 * (p3[1] - p1[1]) - s3 * (p2[1] - p1[1])) / det;
          c[1] = (s3 * (p2[0] - p1[0]) - s2 * (p3[0] - p1[0])) / det;
          out.push_back(c);
        }
      }
    } else {
      // 3D: solve the 3x3 bisector system for each local 4-tuple.
      for (size_t a = 0; a < neigh.size(); ++a)
        for (size_t b = a + 1; b < neigh.size(); ++b)
          for (size_t c3 = b + 1; c3 < neigh.size(); ++c3) {
            uint32_t j = neigh[a], k = neigh[b], l = neigh[c3];
            if (j <= i || k <= i || l <= i) continue;
            const Vec &p1 = pts[i], &p2 = pts[j], &p3 = pts[k], &p4 = pts[l];
            double A[3][4];
            const Vec* others[3] = {&p2, &p3, &p4};
            for (int row = 0; row < 3; ++row) {
              const Vec& q = *others[row];
              for (int col = 0; col < 3; ++col) A[row][col] = 2.0 * (q[col] - p1[col]);
              A[row][3] = norm2(q) - norm2(p1);
            }
            // Gaussian elimination.
            bool singular = false;
            for (int col = 0; col < 3 && !singular; ++col) {
              int piv = col;
              for (int row = col + 1; row < 3; ++row)
                if (std::abs(A[row][col]) > std::abs(A[piv][col])) piv = row;
              if (std::abs(A[piv][col]) < 1e-12) {
                singular = true;
                break;
              }
              std::swap(A[piv], A[col]);
              for (int row = 0; row < 3; ++row) {
                if (row == col) continue;
                double f = A[row][col] / A[col][col];
                for (int cc = col; cc < 4; ++cc) A[row][cc] -= f * A[col][cc];
              }
            }
            if (singular) continue;
            out.push_back(Vec(A[0][3] / A[0][0], A[1][3] / A[1][1], A[2][3] / A[2][2]));
          }
    }
  }
}

double max_hole_depth(const PointSet& P, const Box& region, double R) {
  const int d = P.dim();
  double far = 4.0 * R;
  double pitch = R / 4.0;
  double worst = 0.0;
  // Probe grid with pitch <= R/4.
  int64_t steps[3] = {0, 0, 0};
  for (int i = 0; i < d; ++i)
    steps[i] = std::max<int64_t>(1, static_cast<int64_t>(std::ceil((region.hi[i] - region.lo[i]) / pitch)));
  for (int64_t ix = 0; ix <= steps[0]; ++ix)
    for (int64_t iy = 0; iy <= (d > 1 ? steps[1] : 0); ++iy)
      for (int64_t iz = 0; iz <= (d > 2 ? steps[2] : 0); ++iz) {
        Vec m;
        m[0] = region.lo[0] + (region.hi[0] - region.lo[0]) * static_cast<double>(ix) / static_cast<double>(steps[0]);
        if (d > 1) m[1] = region.lo[1] + (region.hi[1] - region.lo[1]) * static_cast<double>(iy) / static_cast<double>(steps[1]);
        if (d > 2) m[2] = region.lo[2] + (region.hi[2] - region.lo[2]) * static_cast<double>(iz) / static_cast<double>(steps[2]);
        worst = std::max(worst, P.nearest_distance(m, far));
      }
  // Exact deep holes from bisector vertices inside the region.
  std::vector<Vec> cand;
  collect_vertex_candidates(P, R, cand);
  for (const Vec& c : cand) {
    if (!region.contains_closed(c, 1e-12)) continue;
    worst = std::max(worst, P.nearest_distance(c, far));
  }
  return worst;
}

}  // namespace

double covering_radius_estimate(const PointSet& P, double R_hint) {
  Box eroded = P.window().eroded(R_hint);
  if (eroded.empty() || eroded.volume() < 0.0)
    throw std::runtime_error("insufficient window");
  return max_hole_depth(P, eroded, R_hint);
}

bool verify_relative_denseness(const PointSet& P, double R) {
  if (R <= 0.0) throw std::invalid_argument("verify_relative_denseness: R must be > 0");
  Box eroded = P.window().eroded(R);
  for (int i = 0; i < P.dim(); ++i)
    if (eroded.lo[i] > eroded.hi[i]) throw std::runtime_error("insufficient window");
  if (P.size() == 0) return false;
  double worst = max_hole_depth(P, eroded, R);
  return worst <= R + P.tol();
}

namespace {

/// One-sided eps-agreement of P against Q on the probe ball B_{1/eps}(ref).
/// Returns the largest distance from a P-point in the ball to Q (0 when the
/// ball holds no P-point).
double agreement_gap(const PointSet& P, const PointSet& Q, const Vec& ref, double eps,
                     bool& clipped) {
  double probe = 1.0 / eps;
  Box probe_box = Box::of(ref - Vec(probe, probe, probe), ref + Vec(probe, probe, probe), P.dim());
  if (!P.window().contains_box(probe_box)) clipped = true;
  double worst = 0.0;
  for (uint32_t id : P.in_ball(ref, probe, true)) {
    double d = Q.nearest_distance(P.points()[id], std::max(eps * 4.0, 1.0));
    if (!(d < std::numeric_limits<double>::infinity()))
      d = Q.nearest_distance(P.points()[id], probe + 1.0);
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

HullDistanceResult hull_distance(const PointSet& P, const PointSet& Q, const Vec& reference) {
  if (P.r() != Q.r())
    throw std::invalid_argument("hull_distance: point sets must share the discreteness radius");
  if (!P.window().contains_closed(reference) || !Q.window().contains_closed(reference))
    throw std::invalid_argument("hull_distance: reference must lie in both windows");

  HullDistanceResult res;
  const double cap = 1.0 / std::sqrt(2.0);
  auto agree = [&](double eps) {
    bool clipped = false;
    double g1 = agreement_gap(P, Q, reference, eps, clipped);
    double g2 = agreement_gap(Q, P, reference, eps, clipped);
    if (clipped) res.window_limited = true;
    return std::max(g1, g2) < eps;
  };

  if (!agree(cap)) {
    res.value = cap;
    return res;
  }
  double lo = 0.0, hi = cap;  // agree(hi) holds; agree(lo+) unknown
  while (hi - lo > 1e-9) {
    double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    if (agree(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.value = hi;
  return res;
}

}  // namespace pse
