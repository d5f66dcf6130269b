#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pse/colouring.hpp"
#include "pse/geometry.hpp"
#include "pse/patterns.hpp"

namespace pse {

/// Class of the symmetric quotient (V x V)/~, stored as the lex-sorted pair
/// of endpoint coordinates. Diagonal classes (a == b) carry vertices, the
/// others edges.
struct EncodedClass {
  Vec a, b;

  bool diagonal() const { return a == b; }
  static EncodedClass vertex(const Vec& v) { return {v, v}; }
  static EncodedClass edge(const Vec& v, const Vec& w);
};

/// Quotient metric: min over the two endpoint pairings of the max endpoint
/// distance.
double quotient_distance(const EncodedClass& m1, const EncodedClass& m2);

/// Simple geometric graph encoded as a point set of quotient classes. The
/// encoded set inherits the vertex set's uniform discreteness radius, which
/// is re-verified at construction.
class Graph {
 public:
  Graph(PointSet vertices, std::vector<std::pair<uint32_t, uint32_t>> edges);

  const PointSet& vertices() const { return vertices_; }
  const std::vector<std::pair<uint32_t, uint32_t>>& edges() const { return edges_; }
  const std::vector<EncodedClass>& encoded() const { return encoded_; }
  int dim() const { return vertices_.dim(); }
  double r() const { return vertices_.r(); }
  double tol() const { return vertices_.tol(); }
  double encoded_min_distance() const { return encoded_min_distance_; }

  /// Class id layout: vertex i -> i, edge e -> vertex count + e.
  size_t class_count() const { return vertices_.size() + edges_.size(); }
  EncodedClass class_at(size_t id) const;

  bool has_vertex_at(const Vec& v) const { return vertices_.find(v).has_value(); }
  /// Id of the edge between the two positions, if present.
  std::optional<size_t> find_edge(const Vec& v, const Vec& w) const;
  std::optional<size_t> find_class(const EncodedClass& c) const;

 private:
  PointSet vertices_;
  std::vector<std::pair<uint32_t, uint32_t>> edges_;
  std::vector<EncodedClass> encoded_;
  std::vector<std::vector<std::pair<uint32_t, size_t>>> adjacency_;  // vertex -> (other, edge id)
  double encoded_min_distance_ = 0.0;
};

/// Builds the encoded graph; throws on dangling, duplicate, or self-loop
/// edges.
Graph encode_graph(PointSet vertices, std::vector<std::pair<uint32_t, uint32_t>> edges);

/// Z^2 grid graph with nearest-neighbour edges on [-n, n]^2.
Graph grid_graph(int n);

/// A patch or partial query in the encoded space: a finite list of classes.
struct PatchQuery {
  std::vector<EncodedClass> classes;
  int dim = 2;
  double r = 1.0;
  CoordMode mode = CoordMode::Int;
  double tol = kTolMatch;

  static PatchQuery single_edge_with_endpoints(const Vec& v, const Vec& w, double r,
                                               CoordMode mode = CoordMode::Int);
  /// Adds the missing diagonal classes (the minimal patch containing the
  /// query).
  PatchQuery closure() const;
  bool is_patch() const;  // closed under taking endpoints
};

/// card{ Ht subset of G : exists x in D^{-1} : x*query = Ht }, keyed on the
/// matched class subset. Queries with a diagonal class anchor on vertices;
/// pure edge queries anchor on edges (translation groups).
OccurrenceCount count_patch_occurrences(const Graph& G, const PatchQuery& query,
                                        const Window& D, const GroupSpec& spec,
                                        int workers = 0);

/// Patch frequency over a window sequence (counts via the encoded point
/// sets; the subgraph predicate holds because every matched class must be
/// present in G).
FrequencyEstimate patch_frequency(const Graph& G, const PatchQuery& H, const WindowSequence& seq,
                                  int workers = 0);

/// Graph colouring: independent draws, one marginal for vertices and one for
/// edges; colours are indexed like the encoded classes.
struct ColouredGraph {
  const Graph* graph = nullptr;
  std::vector<double> colours;

  double vertex_colour(uint32_t vertex_id) const { return colours[vertex_id]; }
  double edge_colour(size_t edge_id) const {
    return colours[graph->vertices().size() + edge_id];
  }
};

ColouredGraph sample_graph_colouring(const Graph& G, const Marginal& vertex_law,
                                     const Marginal& edge_law, uint64_t seed);

}  // namespace pse
