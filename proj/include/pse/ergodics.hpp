#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pse/colouring.hpp"
#include "pse/geometry.hpp"
#include "pse/groups.hpp"
#include "pse/patterns.hpp"

namespace pse {

/// Compactly supported profile phi: indicator of an open box/ball, or a tent
/// peaking at the centre and vanishing on the ball boundary.
struct Profile {
  enum class Kind { IndicatorBox, IndicatorBall, TentBall } kind = Kind::IndicatorBox;
  Vec center;
  double radius = 0.5;  // half-side for boxes

  static Profile indicator_box(const Vec& center, double half_side) {
    return {Kind::IndicatorBox, center, half_side};
  }
  static Profile indicator_ball(const Vec& center, double radius) {
    return {Kind::IndicatorBall, center, radius};
  }
  static Profile tent(const Vec& center, double radius) {
    return {Kind::TentBall, center, radius};
  }

  double eval(const Vec& m) const;
  double sup_norm() const { return 1.0; }
  double support_circumradius(int dim) const;
  Box support_hull(int dim) const;
  /// Integral of the profile over the whole space (closed form).
  double total_integral(int dim) const;
};

/// Scanning function: a product of factors, each summing a profile (and
/// optionally a colour profile) over the points. An empty product is the
/// constant 1.
struct ScanningFunction {
  struct Factor {
    Profile phi;
    std::optional<ColourProfile> psi;
  };
  std::vector<Factor> factors;

  static ScanningFunction constant_one() { return {}; }
  static ScanningFunction f_phi(const Profile& phi) { return {{Factor{phi, std::nullopt}}}; }
  static ScanningFunction f_phi_psi(const Profile& phi, const ColourProfile& psi) {
    return {{Factor{phi, psi}}};
  }
  static ScanningFunction product(std::vector<Factor> fs) { return {std::move(fs)}; }

  bool coloured() const;
  bool supports_disjoint(int dim) const;
  double eval(const PointSet& P, const GroupElement& x) const;
  double eval(const ColouredPointSet& Pw, const GroupElement& x) const;
};

struct BirkhoffEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long long samples = 0;
  bool truncated = false;
};

/// Monte Carlo window average (1/vol D) * int_D f(x q) dx with Haar-uniform
/// draws (uniform on the base, independent uniform angle for E(2)).
BirkhoffEstimate birkhoff_average_mc(const PointSet& q, const ScanningFunction& f,
                                     const Window& D, const GroupSpec& spec, long long samples,
                                     uint64_t seed, int workers = 0);
BirkhoffEstimate birkhoff_average_mc(const ColouredPointSet& q, const ScanningFunction& f,
                                     const Window& D, const GroupSpec& spec, long long samples,
                                     uint64_t seed, int workers = 0);

struct PatternContribution {
  Pattern representative;        // canonical form of the class
  double placement_integral = 0; // shared by every member of the class
  long long multiplicity = 0;    // enumerated members inside the window
};

struct ExactDecomposition {
  double integral_sum = 0.0;        // sum over placed patterns of I(Q)
  double average = 0.0;             // integral_sum / vol(D)
  double class_regrouped_sum = 0.0; // sum over classes of I * multiplicity
  long long pattern_count = 0;
  std::vector<PatternContribution> classes;
  double window_volume = 0.0;
  bool truncated = false;
};

/// Exact evaluation of int_D (prod_i f_{phi_i})(xP) dx as a sum of placement
/// integrals over the k-point patterns admitting a bijective placement into
/// the supports with a witness in D. Translation groups; indicator boxes in
/// closed form, other profiles by adaptive quadrature (relative error 1e-6).
ExactDecomposition birkhoff_average_exact(const PointSet& P, const ScanningFunction& f,
                                          const Window& D, const GroupSpec& spec,
                                          int workers = 0);

/// Per-point window weights w_p = int_D phi(x p) dx for translation groups;
/// closed form in the interior, quadrature on clipped boundary cases.
std::vector<double> birkhoff_point_weights(const PointSet& P, const Profile& phi,
                                           const Window& D, bool& truncated, int workers = 0);

struct CylinderSpec {
  Pattern pattern;  // the k reference points
  double eps = 0.25;
  std::vector<ColourProfile> colour_sets;  // empty for uncoloured cylinders
};

struct CylinderReport {
  double direct_estimate = 0.0;
  double direct_stderr = 0.0;
  double frequency = 0.0;               // nu(Q), extrapolated
  double placement_volume = 0.0;        // vol{x : xQ inside the eps-balls}
  long long realisable_permutations = 1;
  bool placement_volume_by_mc = false;
  double product_value = 0.0;           // nu(Q) * placement volume
  double gap = 0.0;
};

/// Ergodic cylinder-measure estimate: direct MC of the exactly-one-point
/// indicator versus frequency times placement volume. Throws when eps >= r/2,
/// when the eps-balls overlap, or when an inequivalent k-pattern fits the
/// thickened reference pattern.
CylinderReport estimate_cylinder_measure(const PointSet& P, const CylinderSpec& spec,
                                         const WindowSequence& seq, long long mc_samples,
                                         uint64_t seed, int workers = 0);

struct ColouredCylinderReport {
  double direct_estimate = 0.0;
  double direct_stderr = 0.0;
  double crosscheck = 0.0;  // mu(C_U) * prod P(A_i), i.i.d. laws only
  bool crosscheck_applicable = false;
  double gap = 0.0;
};

ColouredCylinderReport estimate_coloured_cylinder(const PointSet& P, const ColourLaw& law,
                                                  const CylinderSpec& spec,
                                                  const WindowSequence& seq,
                                                  long long colour_trials, uint64_t seed,
                                                  int workers = 0);

struct LlnRow {
  int window_index = 0;
  double volume = 0.0;
  double mean = 0.0;      // empirical mean of Y_n over the trials
  double expected = 0.0;  // E[Y_n] (closed form for i.i.d. laws)
  double deviation_std = 0.0;
  double predicted_std = 0.0;  // closed form for i.i.d. laws, else 0
  bool truncated = false;
};

struct LlnReport {
  std::vector<LlnRow> rows;
  double decay_exponent = 0.0;  // slope of log std against log vol
};

/// Distribution of Y_n - E[Y_n] across independent colourings, per window.
/// The scanning function must be a single colour factor so Y_n evaluates
/// exactly through the point weights.
LlnReport lln_gap_diagnostic(const PointSet& P, const ColourLaw& law, const ScanningFunction& f,
                             const WindowSequence& seq, int trials, uint64_t seed,
                             int workers = 0);

struct ConsistencyRow {
  int window_index = 0;
  double volume = 0.0;
  double spread = 0.0;  // max pairwise gap of the averages across translates
  bool truncated = false;
};

/// Birkhoff averages restarted from x*P for each listed translate; the
/// per-window spread is the empirical unique-ergodicity diagnostic.
std::vector<ConsistencyRow> ergodic_consistency_report(const PointSet& P,
                                                       const ScanningFunction& f,
                                                       const WindowSequence& seq,
                                                       const std::vector<GroupElement>& translates,
                                                       int workers = 0);

}  // namespace pse
