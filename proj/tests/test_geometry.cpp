#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pse/generators.hpp"
#include "pse/geometry.hpp"
#include "pse/rng.hpp"

#include "oracles.hpp"

using namespace pse;

namespace {

PointSet square_lattice(double half_extent, double r = 1.0) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::Lattice;
  spec.dim = 2;
  spec.window_half_extent = half_extent;
  PointSet P = generate(spec);
  if (r == 1.0) return P;
  return PointSet(P.points(), r, P.window(), CoordMode::Int);
}

PointSet integer_line(double half_extent, double shift = 0.0) {
  std::vector<Vec> pts;
  for (long long i = -static_cast<long long>(half_extent); i <= half_extent; ++i) {
    double x = static_cast<double>(i) + shift;
    if (x >= -half_extent && x <= half_extent) pts.push_back(Vec(x));
  }
  return PointSet(pts, 1.0, Box::centred(half_extent, 1),
                  shift == 0.0 ? CoordMode::Int : CoordMode::Float);
}

}  // namespace

TEST_CASE("ball counting on the integer lattice") {
  PointSet P = square_lattice(5.0);

  auto c1 = contains_ball_point(P, Vec(0, 0), 0.5);
  CHECK(c1.count == 1);
  CHECK_FALSE(c1.truncated);

  auto c2 = contains_ball_point(P, Vec(0.5, 0.5), 0.4);
  CHECK(c2.count == 0);

  // Derived by explicit enumeration of lattice points with norm < 1.1.
  auto c3 = contains_ball_point(P, Vec(0, 0), 1.1);
  CHECK(c3.count == oracles::brute_ball_count(P.points(), Vec(0, 0), 1.1, true));
  CHECK(c3.count == 5);

  auto edge = contains_ball_point(P, Vec(5, 0), 0.5);
  CHECK(edge.truncated);
}

TEST_CASE("spatial index agrees with brute force on random queries") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::JitteredLattice;
  spec.window_half_extent = 12.0;
  spec.jitter_amplitude = 0.2;
  spec.seed = 3;
  PointSet P = generate(spec);
  CounterRng rng(99);
  for (int i = 0; i < 1000; ++i) {
    Vec c(rng.uniform(-10, 10), rng.uniform(-10, 10));
    double rad = rng.uniform(0.1, 3.0);
    CHECK(P.count_in_ball(c, rad, true) ==
          oracles::brute_ball_count(P.points(), c, rad, true));
  }
}

TEST_CASE("uniform discreteness verdicts") {
  CHECK(verify_uniform_discreteness(square_lattice(5.0, 1.0)).ok);

  auto bad = verify_uniform_discreteness(square_lattice(5.0, 1.001));
  CHECK_FALSE(bad.ok);
  CHECK(dist(bad.witness_a, bad.witness_b) == doctest::Approx(1.0));

  // Fibonacci chain: min gap is the short tile length; any smaller radius
  // passes, measured against the brute-force minimum on a 1e4-point sample.
  ChainResult chain = generate_chain(GeneratorKind::Fibonacci, 10000);
  double tau = kGoldenRatio;
  PointSet fib(chain.points.points(), 1.0 / (tau * tau), chain.points.window(),
               CoordMode::Float);
  CHECK(verify_uniform_discreteness(fib).ok);
  std::vector<Vec> sample(chain.points.points().begin(),
                          chain.points.points().begin() + 2000);
  CHECK(oracles::brute_min_pairwise(sample) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("relative denseness verdicts") {
  PointSet P = square_lattice(8.0);
  // Covering radius of the square lattice is sqrt(2)/2 ~ 0.707.
  CHECK(verify_relative_denseness(P, 0.8));
  CHECK_FALSE(verify_relative_denseness(P, 0.5));

  // Removing the origin opens a hole of covering radius 1.
  std::vector<Vec> holed;
  for (const Vec& p : P.points())
    if (!(p[0] == 0.0 && p[1] == 0.0)) holed.push_back(p);
  PointSet H(holed, 1.0, P.window(), CoordMode::Int);
  CHECK_FALSE(verify_relative_denseness(H, 0.8));

  CHECK_THROWS_WITH(verify_relative_denseness(square_lattice(2.0), 5.0),
                    "insufficient window");
}

TEST_CASE("hull distance matches the direct epsilon scan") {
  PointSet Z1 = integer_line(60.0);
  PointSet Z1_shift = integer_line(60.0, 0.3);

  auto same = hull_distance(Z1, Z1, Vec(0));
  CHECK(same.value <= 1e-6);

  auto shifted = hull_distance(Z1, Z1_shift, Vec(0));
  double expect = oracles::brute_hull_distance(Z1.points(), Z1_shift.points(), Vec(0));
  CHECK(shifted.value == doctest::Approx(expect).epsilon(1e-3));
  CHECK(shifted.value == doctest::Approx(0.3).epsilon(1e-3));

  // Z + 2 equals Z as a set: enumerate k + 2 over a wider index range.
  std::vector<Vec> moved;
  for (long long k = -70; k <= 70; ++k) {
    double x = static_cast<double>(k) + 2.0;
    if (x >= -60.0 && x <= 60.0) moved.push_back(Vec(x));
  }
  PointSet Z1_moved(moved, 1.0, Z1.window(), CoordMode::Int);
  CHECK(hull_distance(Z1, Z1_moved, Vec(0)).value <= 1e-6);
}

TEST_CASE("hull distance is a pseudometric on sampled windows") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::JitteredLattice;
  spec.window_half_extent = 30.0;
  spec.jitter_amplitude = 0.15;
  PointSet sets[3] = {generate(spec), generate([&] {
                        spec.seed = 5;
                        return spec;
                      }()),
                      generate([&] {
                        spec.seed = 9;
                        return spec;
                      }())};
  double d[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d[i][j] = hull_distance(sets[i], sets[j], Vec(0, 0)).value;
  for (int i = 0; i < 3; ++i) {
    CHECK(d[i][i] <= 1e-6);
    for (int j = 0; j < 3; ++j) {
      CHECK(d[i][j] == doctest::Approx(d[j][i]).epsilon(1e-6));
      for (int k = 0; k < 3; ++k)
        CHECK(d[i][j] <= d[i][k] + d[k][j] + 2e-9);
    }
  }
}

TEST_CASE("thickening membership is monotone in eps") {
  PointSet P = square_lattice(6.0);
  Thickening thin{&P, 0.2}, thick{&P, 0.45};
  CounterRng rng(7);
  for (int i = 0; i < 400; ++i) {
    Vec m(rng.uniform(-5, 5), rng.uniform(-5, 5));
    if (thin.contains(m)) CHECK(thick.contains(m));
  }
  CHECK(thin.contains(Vec(0.1, 0.1)));
  CHECK_FALSE(thin.contains(Vec(0.5, 0.5)));
}

TEST_CASE("window counts respect the packing bound uniformly over placements") {
  PointSet P = square_lattice(20.0);
  Box U = Box::of(Vec(-1.3, -0.8), Vec(1.1, 1.9), 2);
  long long bound = packing_point_bound(U.diameter(), P.r(), 2);
  CounterRng rng(11);
  long long worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Vec shift(rng.uniform(-15, 15), rng.uniform(-15, 15));
    Box placed = U.translated(shift);
    worst = std::max(worst, static_cast<long long>(P.in_box(placed, false).size()));
  }
  CHECK(worst <= bound);
}
