#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pse/geometry.hpp"

namespace pse {

enum class GeneratorKind {
  Lattice,
  Fibonacci,
  SilverChain,
  GridGraph,
  RotatedUnion,
  JitteredLattice,
};

/// Deterministic construction of the study instances.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Lattice;
  int dim = 2;
  double window_half_extent = 50.0;
  /// Lattice basis columns (defaults to the identity).
  std::optional<std::array<Vec, 3>> basis;
  /// Substitution chains: minimum number of points.
  long long length = 10000;
  /// Grid graph half-extent in lattice steps.
  int grid_n = 10;
  /// Rotation angles for the rotated union (radians); default {pi/4}.
  std::vector<double> angles;
  double jitter_amplitude = 0.1;
  uint64_t seed = 1;
};

/// Builds the point set for a generator spec (grid_graph vertices are also
/// produced here; the graphs module attaches edges).
PointSet generate(const GeneratorSpec& spec);

/// Tile lengths used by the substitution chains.
inline constexpr double kGoldenRatio = 1.6180339887498948482;
inline constexpr double kSilverRatio = 2.4142135623730950488;

struct ChainResult {
  PointSet points;
  long long long_tiles = 0;
  long long short_tiles = 0;
};

/// Substitution chain with tile letters expanded from a single seed letter:
/// fibonacci a -> ab, b -> a with lengths (golden, 1); silver a -> aab,
/// b -> a with lengths (silver, 1). Points sit at tile endpoints, centred so
/// the window straddles the origin.
ChainResult generate_chain(GeneratorKind kind, long long min_points);

}  // namespace pse
