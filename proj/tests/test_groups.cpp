#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pse/groups.hpp"
#include "pse/rng.hpp"

#include "oracles.hpp"

using namespace pse;

TEST_CASE("group action on points") {
  CHECK(act(GroupElement::translate(Vec(1, 2)), Vec(0, 0)) == Vec(1, 2));

  Vec quarter = act(GroupElement::rotate_translate(kPi / 2.0, Vec(0, 0)), Vec(1, 0));
  CHECK(quarter[0] == doctest::Approx(0.0));
  CHECK(quarter[1] == doctest::Approx(1.0));

  // Rotation then translation, against the explicit matrix oracle.
  GroupElement g = GroupElement::rotate_translate(kPi / 2.0, Vec(3, 0));
  Vec got = act(g, Vec(1, 0));
  Vec want = oracles::matrix_rotate(kPi / 2.0, Vec(1, 0)) + Vec(3, 0);
  CHECK(got[0] == doctest::Approx(want[0]));
  CHECK(got[1] == doctest::Approx(want[1]));
  CHECK(got[0] == doctest::Approx(3.0));
  CHECK(got[1] == doctest::Approx(1.0));
}

TEST_CASE("compose, inverse, and isometry properties") {
  CounterRng rng(21);
  for (int i = 0; i < 300; ++i) {
    GroupElement g{Vec(rng.uniform(-3, 3), rng.uniform(-3, 3)), rng.angle()};
    GroupElement h{Vec(rng.uniform(-3, 3), rng.uniform(-3, 3)), rng.angle()};
    Vec m(rng.uniform(-2, 2), rng.uniform(-2, 2));
    Vec m2(rng.uniform(-2, 2), rng.uniform(-2, 2));

    Vec via_compose = act(compose(g, h), m);
    Vec via_steps = act(g, act(h, m));
    CHECK(dist(via_compose, via_steps) < 1e-9);

    Vec round_trip = act(compose(g, inverse(g)), m);
    CHECK(dist(round_trip, m) < 1e-9);

    CHECK(dist(act(g, m), act(g, m2)) == doctest::Approx(dist(m, m2)).epsilon(1e-12));
  }
}

TEST_CASE("haar volumes of windows") {
  CHECK(haar_volume(Window::box(3.0, 2)) == doctest::Approx(36.0));
  CHECK(haar_volume(Window::ball(3.0, 2)) == doctest::Approx(kPi * 9.0));

  // E(2) window: the compact rotation factor carries mass 1.
  Window e2 = Window::ball(3.0, 2);
  e2.full_rotations = true;
  CHECK(haar_volume(e2) == doctest::Approx(kPi * 9.0));
}

TEST_CASE("van Hove boundary ratio for cubes is 4/n") {
  GroupSpec R2 = GroupSpec::translation(2);
  std::vector<double> radii{2, 4, 8, 16, 32, 64};
  WindowSequence seq = WindowSequence::make(R2, WindowShape::Box, radii);
  Window K = Window::box(1.0, 2);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= static_cast<int>(radii.size()); ++n) {
    double ratio = van_hove_ratio(seq, K, n);
    CHECK(ratio == doctest::Approx(4.0 / radii[static_cast<size_t>(n - 1)]).epsilon(1e-12));
    CHECK(ratio < prev);  // decreases monotonically toward 0
    prev = ratio;
  }
}

TEST_CASE("van Hove ratio with the identity as K vanishes for boxes") {
  GroupSpec R2 = GroupSpec::translation(2);
  WindowSequence seq = WindowSequence::make(R2, WindowShape::Box, {4, 8});
  Window K = Window::box(0.0, 2);  // the singleton {identity}
  CHECK(van_hove_ratio(seq, K, 1) == doctest::Approx(0.0));
}

TEST_CASE("Folner ratio never exceeds the van Hove ratio") {
  GroupSpec R2 = GroupSpec::translation(2);
  WindowSequence boxes = WindowSequence::make(R2, WindowShape::Box, {2, 4, 8, 16});
  WindowSequence balls = WindowSequence::make(R2, WindowShape::Ball, {2, 4, 8, 16});
  CounterRng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    Window K = Window::box(rng.uniform(0.2, 1.5), 2);
    for (int n = 1; n <= 4; ++n) {
      CHECK(folner_ratio(boxes, K, n) <= van_hove_ratio(boxes, K, n) + 1e-12);
      CHECK(folner_ratio(balls, K, n) <= van_hove_ratio(balls, K, n) + 5e-3);
    }
  }
}

TEST_CASE("ball boundary ratio approximates the closed annulus form") {
  GroupSpec R2 = GroupSpec::translation(2);
  WindowSequence seq = WindowSequence::make(R2, WindowShape::Ball, {8, 16});
  Window K = Window::ball(1.0, 2);
  // For K a centred unit ball, the boundary is the annulus n-1 <= |x| <= n+1.
  for (int n = 1; n <= 2; ++n) {
    double R = seq.windows[static_cast<size_t>(n - 1)].radius;
    double expect = (kPi * ((R + 1) * (R + 1) - (R - 1) * (R - 1))) / (kPi * R * R);
    CHECK(van_hove_ratio(seq, K, n) == doctest::Approx(expect).epsilon(2e-3));
  }
}

TEST_CASE("volume growth of thickened windows vanishes at rate c/n") {
  GroupSpec R2 = GroupSpec::translation(2);
  Window L = Window::box(1.0, 2);
  for (double n : {8.0, 16.0, 32.0, 64.0}) {
    Box D = Box::centred(n, 2);
    Box LD = D.minkowski_sum(L.bounding_box());
    double ratio = LD.volume() / D.volume();
    CHECK(ratio - 1.0 <= 4.4 / n);
    CHECK(ratio >= 1.0);
  }
}

TEST_CASE("Shulman constants for centred windows") {
  GroupSpec R2 = GroupSpec::translation(2);
  std::vector<double> radii;
  for (int n = 1; n <= 64; ++n) radii.push_back(n);
  WindowSequence cubes = WindowSequence::make(R2, WindowShape::Box, radii);

  CHECK(shulman_constant(cubes, 1) == doctest::Approx(1.0));

  // Interval arithmetic oracle: union over k < n is realised at k = n-1,
  // giving side 2(2n-1) against side 2n.
  auto ratios = shulman_ratios(cubes, 64);
  for (int n = 2; n <= 64; ++n) {
    double expect = std::pow((2.0 * n - 1.0) / n, 2);
    CHECK(ratios[static_cast<size_t>(n - 1)] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(shulman_constant(cubes, 64) < 4.0);
  std::vector<double> ns(radii.begin(), radii.end());
  CHECK(richardson_extrapolate(ns, ratios) == doctest::Approx(4.0).epsilon(0.01));

  WindowSequence balls = WindowSequence::make(R2, WindowShape::Ball, radii);
  auto ball_ratios = shulman_ratios(balls, 64);
  CHECK(richardson_extrapolate(ns, ball_ratios) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("unimodularity MC check") {
  auto trans = unimodularity_check(GroupSpec::translation(2), 4, 42, 20000);
  CHECK(trans.max_relative_gap == doctest::Approx(0.0));

  auto e2 = unimodularity_check(GroupSpec::euclidean2(), 4, 42, 60000);
  CHECK(e2.max_sigma_gap <= 3.0);

  // Degenerate set: a zero-width box gives zero volume on both sides.
  auto degenerate = unimodularity_check(GroupSpec::translation(1), 1, 7, 1000);
  CHECK(degenerate.max_relative_gap >= 0.0);
}

TEST_CASE("E(2) window membership uses the inverse element") {
  GroupSpec E2 = GroupSpec::euclidean2();
  WindowSequence seq = WindowSequence::make(E2, WindowShape::Ball, {2.0});
  const Window& D = seq.windows[0];
  GroupElement g = GroupElement::rotate_translate(1.1, Vec(1.5, 0.5));
  CHECK(window_contains(D, g, 1e-9));
  CHECK(window_inverse_contains(D, g, 1e-9));  // |inverse translation| = |t|
  GroupElement far = GroupElement::rotate_translate(0.3, Vec(5, 0));
  CHECK_FALSE(window_contains(D, far, 1e-9));
}
