#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pse/common.hpp"

namespace pse {

/// Uniform grid over the point-set window; cell size r/sqrt(d) so that any
/// ball of radius r is covered by a bounded cell neighbourhood.
class GridIndex {
 public:
  GridIndex() = default;
  GridIndex(double cell, int dim) : cell_(cell), dim_(dim) {}

  void insert(const Vec& p, uint32_t id);
  /// Indices of stored points within `radius` of `center` (closed, plus
  /// slack); callers refine membership themselves.
  void candidates_in_ball(const Vec& center, double radius, std::vector<uint32_t>& out) const;

  double cell_size() const { return cell_; }

 private:
  int64_t cell_key(const Vec& p) const;

  double cell_ = 1.0;
  int dim_ = 1;
  bool any_ = false;
  int64_t cell_lo_[3] = {0, 0, 0};  // bounding cell range of stored points
  int64_t cell_hi_[3] = {0, 0, 0};
  std::unordered_map<int64_t, std::vector<uint32_t>> cells_;
};

struct BallCount {
  long long count = 0;
  bool truncated = false;  // ball was not fully inside the window
};

struct DiscretenessReport {
  bool ok = true;
  Vec witness_a, witness_b;  // first violating pair when !ok
  double min_distance = 0.0;
};

struct HullDistanceResult {
  double value = 0.0;
  bool window_limited = false;  // some probe ball had to be clipped
};

/// Finite window of a uniformly discrete point set in R^d, d in {1,2,3}.
/// Immutable after construction; all queries are read-only.
class PointSet {
 public:
  PointSet(std::vector<Vec> points, double r, Box window, CoordMode mode,
           double tol = kTolMatch);

  int dim() const { return window_.dim; }
  double r() const { return r_; }
  CoordMode mode() const { return mode_; }
  /// Matching tolerance for geometric equality: 0 in Int mode.
  double tol() const { return mode_ == CoordMode::Int ? 0.0 : tol_; }
  const Box& window() const { return window_; }
  const std::vector<Vec>& points() const { return pts_; }
  size_t size() const { return pts_.size(); }

  /// Points within `radius` of `center`; open balls use strict <, closed
  /// ones <= with the matching tolerance as slack.
  std::vector<uint32_t> in_ball(const Vec& center, double radius, bool open) const;
  long long count_in_ball(const Vec& center, double radius, bool open) const;
  std::vector<uint32_t> in_box(const Box& box, bool open) const;

  /// Index of the point geometrically equal to q, if present.
  std::optional<uint32_t> find(const Vec& q) const;

  /// Distance from q to the nearest point (max_dist caps the search).
  double nearest_distance(const Vec& q, double max_dist) const;

  /// Translate every point (and the window) by t.
  PointSet translated(const Vec& t) const;

 private:
  std::vector<Vec> pts_;
  double r_;
  double tol_;
  CoordMode mode_;
  Box window_;
  GridIndex index_;
};

/// Open eps-neighbourhood of a point set.
struct Thickening {
  const PointSet* source;
  double eps;
  bool contains(const Vec& m) const {
    return source->nearest_distance(m, eps) < eps;
  }
};

/// Exact count of points in the open/closed ball, flagged when the ball
/// leaves the faithful window.
BallCount contains_ball_point(const PointSet& P, const Vec& center, double radius,
                              bool open = true);

/// Checks min pairwise distance >= r with comparisons as computed (exact in
/// Int mode); reports the first violating pair.
DiscretenessReport verify_uniform_discreteness(const PointSet& P);

/// Every closed R-ball centred in the R-eroded window meets P. Uses a grid
/// of probe centres (pitch <= R/4) together with locally-refined deep-hole
/// candidates; throws "insufficient window" when the eroded window is empty.
bool verify_relative_denseness(const PointSet& P, double R);

/// Covering-radius estimate over the eroded window (exposed for tests).
double covering_radius_estimate(const PointSet& P, double R_hint);

/// Point-set metric min(1/sqrt2, inf{eps : P and Q eps-agree on B_{1/eps}}),
/// bisected to 1e-9. Probe balls are clipped at the windows; any clipped
/// evaluation sets window_limited.
HullDistanceResult hull_distance(const PointSet& P, const PointSet& Q, const Vec& reference);

}  // namespace pse
