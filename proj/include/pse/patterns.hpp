#pragma once

#include <optional>
#include <vector>

#include "pse/geometry.hpp"
#include "pse/groups.hpp"

namespace pse {

/// Finite nonempty point configuration, the unit of counting. Points keep
/// the host set's discreteness radius and coordinate mode.
struct Pattern {
  std::vector<Vec> points;
  int dim = 2;
  double source_r = 1.0;
  CoordMode mode = CoordMode::Int;
  double tol = kTolMatch;

  size_t size() const { return points.size(); }
  double match_tol() const { return mode == CoordMode::Int ? 0.0 : tol; }
  /// Lexicographically smallest point (the anchor used by the matchers).
  Vec anchor() const;
  double diameter() const;
  Box bounding_box() const;

  static Pattern from_points(std::vector<Vec> pts, int dim, double source_r,
                             CoordMode mode = CoordMode::Int, double tol = kTolMatch);
  static Pattern of_set(const PointSet& P, const std::vector<uint32_t>& ids);
};

struct CanonicalForm {
  Pattern pattern;      // anchored at the origin, points sorted
  GroupElement witness; // witness * Q == pattern (within tolerance)
};

/// Canonical representative of the T-equivalence class: translation groups
/// move the lex-min point to the origin; E(2) additionally tries every
/// rotation aligning a nearest-neighbour pair with the positive x-axis and
/// keeps the lexicographically smallest sorted coordinate list.
CanonicalForm canonical_form(const Pattern& Q, const GroupSpec& spec);

struct EquivalenceResult {
  bool equivalent = false;
  GroupElement witness;  // witness * Q1 == Q2 when equivalent
};

EquivalenceResult are_equivalent(const Pattern& Q1, const Pattern& Q2, const GroupSpec& spec);

/// Support shape for pattern extraction: an open ball or box whose centre is
/// placed at anchor + offset (offset zero anchors the support centred on the
/// point).
struct SupportShape {
  WindowShape shape = WindowShape::Ball;
  double radius = 1.0;  // half-side for boxes
  Vec offset;
};

struct ExtractedPattern {
  Pattern pattern;
  Vec placement;    // where the support was anchored
  bool truncated = false;
};

/// P cut out by the open support anchored at each point of P (optionally
/// keeping only cardinality-k cuts).
std::vector<ExtractedPattern> extract_patterns(const PointSet& P, const SupportShape& V,
                                               std::optional<size_t> k = std::nullopt);
/// Single placement of the support at a chosen centre.
ExtractedPattern extract_pattern_at(const PointSet& P, const SupportShape& V, const Vec& centre);

struct OccurrenceCount {
  long long count = 0;
  int window_index = 0;
  double window_volume = 0.0;
  bool truncated = false;
};

/// card of { Qt subset of P : exists x in D^{-1} with x*Q = Qt }. Distinct
/// occurrences are keyed on the matched point subset, so a symmetric pattern
/// reached by several group elements counts once.
OccurrenceCount count_occurrences(const PointSet& P, const Pattern& Q, const Window& D,
                                  const GroupSpec& spec, int workers = 0);

/// Restricted count: subsets of P inside the region D^{-1}(origin) that are
/// equivalent to Q under any group element. Translation groups only; used as
/// a finite-size comparison against count_occurrences.
OccurrenceCount count_occurrences_restricted(const PointSet& P, const Pattern& Q,
                                             const Window& D);

struct FrequencyEstimate {
  std::vector<OccurrenceCount> per_window;
  std::vector<double> ratios;       // count / vol(D_n)
  double extrapolated = 0.0;        // Richardson step assuming error ~ c/n
  double diagnostic = 0.0;          // |last ratio - extrapolated|
  double oscillation = 0.0;         // max spread over the last three ratios
};

FrequencyEstimate pattern_frequency(const PointSet& P, const Pattern& Q,
                                    const WindowSequence& seq, int workers = 0);

struct FlcWindowRow {
  double anchor_radius = 0.0;
  long long anchors = 0;
  long long classes = 0;  // cumulative distinct classes up to this window
};

struct FlcReport {
  std::vector<FlcWindowRow> growth;
  std::vector<Pattern> class_representatives;  // canonical forms
  bool flc = false;  // class count stable across the last two windows
};

/// Equivalence classes of the patterns cut out by radius-V_radius balls
/// anchored at points of P, over n_windows growing anchor regions.
FlcReport flc_enumerate(const PointSet& P, double V_radius, int n_windows,
                        const GroupSpec& spec);

}  // namespace pse
