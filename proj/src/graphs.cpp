#include "pse/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "pse/parallel.hpp"
#include "pse/rng.hpp"

namespace pse {

EncodedClass EncodedClass::edge(const Vec& v, const Vec& w) {
  return lex_less(w, v) ? EncodedClass{w, v} : EncodedClass{v, w};
}

double quotient_distance(const EncodedClass& m1, const EncodedClass& m2) {
  double straight = std::max(dist(m1.a, m2.a), dist(m1.b, m2.b));
  double crossed = std::max(dist(m1.a, m2.b), dist(m1.b, m2.a));
  return std::min(straight, crossed);
}

Graph::Graph(PointSet vertices, std::vector<std::pair<uint32_t, uint32_t>> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  const size_t n = vertices_.size();
  std::set<std::pair<uint32_t, uint32_t>> seen;
  for (auto& e : edges_) {
    if (e.first >= n || e.second >= n) throw std::invalid_argument("Graph: dangling edge");
    if (e.first == e.second) throw std::invalid_argument("Graph: self-loop");
    if (e.first > e.second) std::swap(e.first, e.second);
    if (!seen.insert(e).second) throw std::invalid_argument("Graph: duplicate edge");
  }
  std::sort(edges_.begin(), edges_.end());
  encoded_.reserve(n + edges_.size());
  for (const Vec& v : vertices_.points()) encoded_.push_back(EncodedClass::vertex(v));
  adjacency_.assign(n, {});
  for (size_t e = 0; e < edges_.size(); ++e) {
    const auto& [i, j] = edges_[e];
    encoded_.push_back(EncodedClass::edge(vertices_.points()[i], vertices_.points()[j]));
    adjacency_[i].push_back({j, e});
    adjacency_[j].push_back({i, e});
  }
  // The quotient metric keeps distinct classes at least r apart whenever the
  // vertex set is uniformly discrete with radius r; verify on construction.
  double min_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < encoded_.size(); ++i)
    for (size_t j = i + 1; j < encoded_.size(); ++j)
      min_d = std::min(min_d, quotient_distance(encoded_[i], encoded_[j]));
  encoded_min_distance_ = encoded_.size() < 2 ? vertices_.r() : min_d;
  if (encoded_min_distance_ < vertices_.r() - vertices_.tol())
    throw std::invalid_argument("Graph: encoded classes violate the discreteness radius");
}

EncodedClass Graph::class_at(size_t id) const { return encoded_[id]; }

std::optional<size_t> Graph::find_edge(const Vec& v, const Vec& w) const {
  auto vi = vertices_.find(v);
  auto wi = vertices_.find(w);
  if (!vi || !wi) return std::nullopt;
  for (const auto& [other, edge_id] : adjacency_[*vi])
    if (other == *wi) return vertices_.size() + edge_id;
  return std::nullopt;
}

std::optional<size_t> Graph::find_class(const EncodedClass& c) const {
  if (c.diagonal()) {
    auto vi = vertices_.find(c.a);
    if (!vi) return std::nullopt;
    return static_cast<size_t>(*vi);
  }
  return find_edge(c.a, c.b);
}

Graph encode_graph(PointSet vertices, std::vector<std::pair<uint32_t, uint32_t>> edges) {
  return Graph(std::move(vertices), std::move(edges));
}

Graph grid_graph(int n) {
  if (n < 1) throw std::invalid_argument("grid_graph: n must be >= 1");
  std::vector<Vec> pts;
  auto vid = [n](int i, int j) {
    return static_cast<uint32_t>((i + n) * (2 * n + 1) + (j + n));
  };
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) pts.push_back(Vec(i, j));
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j) {
      if (i + 1 <= n) edges.push_back({vid(i, j), vid(i + 1, j)});
      if (j + 1 <= n) edges.push_back({vid(i, j), vid(i, j + 1)});
    }
  PointSet vertices(std::move(pts), 1.0, Box::centred(static_cast<double>(n), 2),
                    CoordMode::Int);
  return Graph(std::move(vertices), std::move(edges));
}

PatchQuery PatchQuery::single_edge_with_endpoints(const Vec& v, const Vec& w, double r,
                                                  CoordMode mode) {
  PatchQuery q;
  q.classes = {EncodedClass::vertex(v), EncodedClass::vertex(w), EncodedClass::edge(v, w)};
  q.dim = 2;
  q.r = r;
  q.mode = mode;
  return q;
}

PatchQuery PatchQuery::closure() const {
  PatchQuery out = *this;
  auto has_vertex = [&](const Vec& v) {
    for (const EncodedClass& c : out.classes)
      if (c.diagonal() && almost_equal(c.a, v, std::max(tol, 1e-12))) return true;
    return false;
  };
  for (const EncodedClass& c : classes) {
    if (c.diagonal()) continue;
    if (!has_vertex(c.a)) out.classes.push_back(EncodedClass::vertex(c.a));
    if (!has_vertex(c.b)) out.classes.push_back(EncodedClass::vertex(c.b));
  }
  return out;
}

bool PatchQuery::is_patch() const {
  for (const EncodedClass& c : classes) {
    if (c.diagonal()) continue;
    bool va = false, vb = false;
    for (const EncodedClass& d : classes) {
      if (!d.diagonal()) continue;
      if (almost_equal(d.a, c.a, std::max(tol, 1e-12))) va = true;
      if (almost_equal(d.a, c.b, std::max(tol, 1e-12))) vb = true;
    }
    if (!va || !vb) return false;
  }
  return true;
}

namespace {

/// Applies a group element to a class (the diagonal action of the group on
/// the quotient).
EncodedClass act_class(const GroupElement& x, const EncodedClass& c) {
  if (c.diagonal()) return EncodedClass::vertex(act(x, c.a));
  return EncodedClass::edge(act(x, c.a), act(x, c.b));
}

/// All classes of the query present in G when moved by x; nullopt otherwise.
std::optional<std::vector<size_t>> match_query(const Graph& G, const PatchQuery& query,
                                               const GroupElement& x) {
  std::vector<size_t> ids;
  ids.reserve(query.classes.size());
  for (const EncodedClass& c : query.classes) {
    auto hit = G.find_class(act_class(x, c));
    if (!hit) return std::nullopt;
    ids.push_back(*hit);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

OccurrenceCount count_patch_occurrences(const Graph& G, const PatchQuery& query,
                                        const Window& D, const GroupSpec& spec, int workers) {
  if (query.classes.empty())
    throw std::invalid_argument("count_patch_occurrences: empty query");
  OccurrenceCount out;
  out.window_index = D.index;
  out.window_volume = haar_volume(D);
  const PointSet& V = G.vertices();
  double tol = std::max(V.tol(), 1e-12);

  // Anchor class: prefer a diagonal (vertex) class, lex-min among them.
  const EncodedClass* anchor = nullptr;
  for (const EncodedClass& c : query.classes) {
    if (!c.diagonal()) continue;
    if (!anchor || lex_less(c.a, anchor->a, tol)) anchor = &c;
  }
  bool vertex_anchored = anchor != nullptr;
  if (!vertex_anchored) {
    if (spec.rotational())
      throw std::invalid_argument(
          "count_patch_occurrences: pure edge queries need a translation group");
    for (const EncodedClass& c : query.classes)
      if (!anchor || lex_less(c.a, anchor->a, tol)) anchor = &c;
  }

  // Truncation: the window must act inside the vertex window on the query's
  // bounding region.
  {
    double reach = D.shape == WindowShape::Box
                       ? D.radius * std::sqrt(static_cast<double>(D.dim))
                       : D.radius;
    double qmax = 0.0;
    for (const EncodedClass& c : query.classes)
      qmax = std::max({qmax, norm(c.a), norm(c.b)});
    out.truncated = !V.window().contains_box(
        Box::centred(reach + norm(D.center) + qmax, V.dim()));
  }

  // Candidate anchors in G; pure edge queries widen the reach so both edge
  // orientations stay covered.
  std::vector<uint32_t> anchors;
  if (!spec.rotational()) {
    double circum = D.shape == WindowShape::Box
                        ? D.radius * std::sqrt(static_cast<double>(D.dim))
                        : D.radius;
    double extra = vertex_anchored ? 0.0 : dist(anchor->a, anchor->b);
    anchors = V.in_ball(anchor->a - D.center, circum + extra + tol, false);
  } else {
    Box base = D.shape == WindowShape::Box ? D.bounding_box()
                                           : Box::centred(D.radius, D.dim).translated(D.center);
    anchors = V.in_ball(Vec(), base.max_dist(anchor->a) + tol, false);
  }

  // Rotation reference: nearest distinct vertex class of the query.
  Vec ref;
  double ref_dist = 0.0;
  bool have_ref = false;
  if (spec.rotational()) {
    for (const EncodedClass& c : query.classes) {
      if (!c.diagonal() || almost_equal(c.a, anchor->a, tol)) continue;
      double d = dist(c.a, anchor->a);
      if (!have_ref || d < ref_dist) {
        ref = c.a;
        ref_dist = d;
        have_ref = true;
      }
    }
  }

  int w = resolve_workers(workers);
  std::vector<std::vector<std::vector<size_t>>> found(static_cast<size_t>(std::max(w, 1)));
  parallel_chunks(anchors.size(), w, [&](int worker, size_t begin, size_t end) {
    auto& local = found[static_cast<size_t>(worker)];
    for (size_t ai = begin; ai < end; ++ai) {
      const Vec& p = V.points()[anchors[ai]];
      if (!spec.rotational()) {
        if (vertex_anchored) {
          GroupElement x = GroupElement::translate(p - anchor->a);
          if (!window_inverse_contains(D, x, tol)) continue;
          if (auto ids = match_query(G, query, x)) local.push_back(std::move(*ids));
        } else {
          // Edge-anchored: both pairings of the anchor edge against incident
          // edges of p.
          for (const Vec& head : {anchor->a, anchor->b}) {
            GroupElement x = GroupElement::translate(p - head);
            if (!window_inverse_contains(D, x, tol)) continue;
            if (auto ids = match_query(G, query, x)) local.push_back(std::move(*ids));
          }
        }
        continue;
      }
      if (!have_ref) {
        // Single-vertex query under E(2): any rotation; feasibility as for
        // point patterns.
        Box base = D.shape == WindowShape::Box
                       ? D.bounding_box()
                       : Box::centred(D.radius, D.dim).translated(D.center);
        double rr = norm(p);
        double dmin = D.shape == WindowShape::Ball
                          ? std::max(0.0, dist(anchor->a, D.center) - D.radius)
                          : base.min_dist(anchor->a);
        double dmax = D.shape == WindowShape::Ball ? dist(anchor->a, D.center) + D.radius
                                                   : base.max_dist(anchor->a);
        if (rr >= dmin - tol && rr <= dmax + tol) {
          GroupElement x = GroupElement::translate(p - anchor->a);
          if (auto ids = match_query(G, query, x)) local.push_back(std::move(*ids));
        }
        continue;
      }
      for (uint32_t nb : V.in_ball(p, ref_dist + 4.0 * tol, false)) {
        const Vec& pp = V.points()[nb];
        if (std::abs(dist(p, pp) - ref_dist) > 4.0 * tol) continue;
        Vec u = ref - anchor->a, v = pp - p;
        double theta = wrap_angle(std::atan2(v[1], v[0]) - std::atan2(u[1], u[0]));
        GroupElement x;
        x.angle = theta;
        x.translation = p - rotate(theta, anchor->a);
        if (!window_inverse_contains(D, x, tol)) continue;
        if (auto ids = match_query(G, query, x)) local.push_back(std::move(*ids));
      }
    }
  });

  std::set<std::vector<size_t>> distinct;
  for (auto& local : found)
    for (auto& ids : local) distinct.insert(std::move(ids));
  out.count = static_cast<long long>(distinct.size());
  return out;
}

FrequencyEstimate patch_frequency(const Graph& G, const PatchQuery& H, const WindowSequence& seq,
                                  int workers) {
  if (H.classes.empty()) throw std::invalid_argument("patch_frequency: empty patch");
  FrequencyEstimate est;
  std::vector<double> radii;
  for (const Window& D : seq.windows) {
    OccurrenceCount oc = count_patch_occurrences(G, H, D, seq.group, workers);
    est.per_window.push_back(oc);
    est.ratios.push_back(static_cast<double>(oc.count) / oc.window_volume);
    radii.push_back(D.radius);
  }
  if (est.ratios.size() >= 2) {
    est.extrapolated = richardson_extrapolate(radii, est.ratios);
    est.diagnostic = std::abs(est.ratios.back() - est.extrapolated);
  } else if (!est.ratios.empty()) {
    est.extrapolated = est.ratios.back();
  }
  size_t m = est.ratios.size();
  if (m >= 3) {
    double lo = est.ratios[m - 3], hi = lo;
    for (size_t i = m - 3; i < m; ++i) {
      lo = std::min(lo, est.ratios[i]);
      hi = std::max(hi, est.ratios[i]);
    }
    est.oscillation = hi - lo;
  }
  return est;
}

ColouredGraph sample_graph_colouring(const Graph& G, const Marginal& vertex_law,
                                     const Marginal& edge_law, uint64_t seed) {
  const size_t n = G.class_count();
  // Rank classes lexicographically by (a, b) so streams transport under
  // translations exactly as the point-set sampler does.
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  double tol = G.tol();
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    EncodedClass ci = G.class_at(i), cj = G.class_at(j);
    if (lex_less(ci.a, cj.a, tol)) return true;
    if (lex_less(cj.a, ci.a, tol)) return false;
    return lex_less(ci.b, cj.b, tol);
  });
  std::vector<double> colours(n, 0.0);
  for (size_t rank = 0; rank < n; ++rank) {
    CounterRng rng(seed, 0x9E0, rank);
    size_t id = order[rank];
    bool is_vertex = id < G.vertices().size();
    colours[id] = is_vertex ? vertex_law.sample(rng) : edge_law.sample(rng);
  }
  return ColouredGraph{&G, std::move(colours)};
}

}  // namespace pse
