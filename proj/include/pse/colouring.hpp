#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "pse/geometry.hpp"
#include "pse/groups.hpp"
#include "pse/rng.hpp"

namespace pse {

/// Colour space: a finite alphabet {0, .., size-1} or a real interval.
struct ColourSpace {
  enum class Kind { Finite, RealInterval } kind = Kind::Finite;
  int alphabet_size = 2;
  double lo = 0.0, hi = 1.0;

  static ColourSpace finite(int size) {
    if (size < 1) throw std::invalid_argument("ColourSpace: empty alphabet");
    ColourSpace s;
    s.kind = Kind::Finite;
    s.alphabet_size = size;
    return s;
  }
  static ColourSpace interval(double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("ColourSpace: degenerate interval");
    ColourSpace s;
    s.kind = Kind::RealInterval;
    s.lo = lo;
    s.hi = hi;
    return s;
  }
};

/// Single-colour distribution.
struct Marginal {
  enum class Kind { Finite, UniformReal } kind = Kind::Finite;
  std::vector<double> probs;  // finite alphabet weights
  double lo = 0.0, hi = 1.0;

  static Marginal bernoulli(double p) { return finite({1.0 - p, p}); }
  static Marginal finite(std::vector<double> probs);
  static Marginal uniform_real(double lo, double hi);

  double sample(CounterRng& rng) const;
};

/// Colour profile psi: evaluated on a single colour; expectations have
/// closed forms against a marginal.
struct ColourProfile {
  enum class Kind { One, IndicatorLabels, IndicatorRange } kind = Kind::One;
  std::set<int> labels;
  double lo = 0.0, hi = 0.0;

  static ColourProfile one() { return {}; }
  static ColourProfile indicator_labels(std::set<int> labels);
  static ColourProfile indicator_range(double lo, double hi);

  double eval(double colour) const;
  double sup_norm() const { return 1.0; }
  /// E[psi(colour)] for an i.i.d. draw from the marginal.
  double expectation(const Marginal& m) const;
};

/// Law of the random colouring: i.i.d. per point, or a moving average of an
/// underlying noise field, which is independent at distances beyond `range`
/// because the averaging kernels become disjoint.
struct ColourLaw {
  enum class Kind { Iid, MovingAverage } kind = Kind::Iid;
  Marginal marginal;          // iid marginal, or the noise marginal
  double range = 0.0;         // independence distance (0 for iid)
  enum class Combine { Mean, Threshold } combine = Combine::Mean;
  double threshold = 0.5;

  static ColourLaw iid(Marginal m) {
    ColourLaw law;
    law.kind = Kind::Iid;
    law.marginal = std::move(m);
    return law;
  }
  static ColourLaw moving_average(Marginal noise, double range, Combine combine,
                                  double threshold = 0.5);

  bool is_iid() const { return kind == Kind::Iid; }
};

/// Point set with one colour per point (colours parallel to base.points()).
struct ColouredPointSet {
  PointSet base;
  std::vector<double> colours;

  double colour_of(uint32_t point_id) const { return colours[point_id]; }
};

/// Draws a colouring. The i.i.d. law keys one RNG stream per point by its
/// rank in lexicographic order, so translating the point set and re-sampling
/// commutes with transporting colours. The moving-average law evaluates a
/// seeded noise field on a grid of pitch range/4 and combines nodes within
/// range/2 of each point.
ColouredPointSet sample_colours(const PointSet& P, const ColourLaw& law, uint64_t seed);

/// x P^(omega): base moved by x, colour of x*p equal to the colour of p.
ColouredPointSet shift_colouring(const GroupElement& x, const ColouredPointSet& Pw);

struct ColourAverageResult {
  double estimate = 0.0;
  double stderr_ = 0.0;
  bool closed_form = false;
  long long trials = 0;
};

struct ScanningFunction;  // ergodics module

/// E_f(P): expected value of f over colourings of P. Closed form for i.i.d.
/// laws with product scanning functions on disjoint supports, Monte Carlo
/// otherwise.
ColourAverageResult colour_average(const PointSet& P, const ScanningFunction& f,
                                   const ColourLaw& law, long long trials, uint64_t seed);

}  // namespace pse
