#pragma once

#include <vector>

#include "pse/common.hpp"

namespace pse {

enum class GroupKind { Translation, Euclidean2 };

/// The acting group: R^d translations (d in 1..3) or E(2) = R^2 x SO(2).
/// Haar volume on E(2) is Lebesgue measure on the translation part with the
/// SO(2) factor normalised to total mass 1, so every frequency is per unit
/// Lebesgue area.
struct GroupSpec {
  GroupKind kind = GroupKind::Translation;
  int dim = 2;

  static GroupSpec translation(int d) { return GroupSpec{GroupKind::Translation, d}; }
  static GroupSpec euclidean2() { return GroupSpec{GroupKind::Euclidean2, 2}; }

  bool rotational() const { return kind == GroupKind::Euclidean2; }
};

/// Group element: rotation by `angle` about the origin followed by the
/// translation. Translation groups keep angle = 0.
struct GroupElement {
  Vec translation;
  double angle = 0.0;

  static GroupElement identity() { return {}; }
  static GroupElement translate(const Vec& t) { return {t, 0.0}; }
  static GroupElement rotate_translate(double angle, const Vec& t) { return {t, angle}; }
};

/// Normalise an angle into [0, 2*pi).
double wrap_angle(double a);

/// Apply a rotation about the origin; cos/sin snapped at exact multiples of
/// pi/2 so quarter turns stay exact in Int mode.
Vec rotate(double angle, const Vec& v);

Vec act(const GroupElement& g, const Vec& m);
GroupElement compose(const GroupElement& g, const GroupElement& h);  // g after h
GroupElement inverse(const GroupElement& g);

enum class WindowShape { Box, Ball };

/// Element D_n of a van Hove sequence: a centred box or ball in the
/// translation part; for E(2) the full SO(2) factor is attached and carries
/// Haar mass 1.
struct Window {
  WindowShape shape = WindowShape::Box;
  int dim = 2;
  Vec center;        // usually the origin
  double radius = 1; // half-side for boxes
  bool full_rotations = false;
  int index = 0;     // position in the sequence

  static Window box(double radius, int dim, int index = 0) {
    return Window{WindowShape::Box, dim, Vec(), radius, false, index};
  }
  static Window ball(double radius, int dim, int index = 0) {
    return Window{WindowShape::Ball, dim, Vec(), radius, false, index};
  }

  Box bounding_box() const;
  /// Closed membership of the translation part, slack tol.
  bool contains_translation(const Vec& t, double tol) const;
};

/// Haar volume: Lebesgue volume of the translation base (the compact
/// rotation factor is normalised away).
double haar_volume(const Window& W);

/// Closed membership of a group element: translation part in the base,
/// rotation part free only when the window carries the SO(2) factor.
bool window_contains(const Window& D, const GroupElement& x, double tol);
/// Membership of x in D^{-1}, i.e. of x^{-1} in D.
bool window_inverse_contains(const Window& D, const GroupElement& x, double tol);

struct WindowSequence {
  GroupSpec group;
  std::vector<Window> windows;

  /// Centred boxes/balls of the given radii. E(2) sequences attach the full
  /// rotation factor and require ball bases for the boundary arithmetic.
  static WindowSequence make(const GroupSpec& spec, WindowShape shape,
                             const std::vector<double>& radii);
};

/// vol(boundary^K D_n) / vol(D_n) for the van Hove boundary
/// (K D) \ interior(D) union (K closure(D^c)) intersect D. Boxes use
/// Minkowski interval arithmetic in closed form; balls are integrated on a
/// midpoint grid to relative error <= 1e-3. For E(2) windows the compact
/// rotation factor reduces K to its translation bounding box.
double van_hove_ratio(const WindowSequence& seq, const Window& K, int n);

/// Folner variant vol(delta^K D_n)/vol(D_n) with
/// delta^K D = (KD)\D union (KD)^c\D^c; always <= the van Hove ratio.
double folner_ratio(const WindowSequence& seq, const Window& K, int n);

/// max_{n <= n_max} vol(union_{k<n} D_k^{-1} D_n) / vol(D_n); the single
/// window convention gives 1. Closed form for centred boxes and balls.
double shulman_constant(const WindowSequence& seq, int n_max);
/// Per-n Shulman ratios (index 0 is n=1 with value 1).
std::vector<double> shulman_ratios(const WindowSequence& seq, int n_max);

struct UnimodularityReport {
  double max_relative_gap = 0.0;
  double max_sigma_gap = 0.0;  // gap in units of the MC standard error
};

/// Compares MC volume estimates of random product sets S and S^{-1}.
UnimodularityReport unimodularity_check(const GroupSpec& spec, int trials, uint64_t seed,
                                        int samples_per_trial = 100000);

/// Richardson extrapolation of a sequence y(n) = y_inf + c/n from its last
/// two entries.
double richardson_extrapolate(const std::vector<double>& radii, const std::vector<double>& values);

}  // namespace pse
