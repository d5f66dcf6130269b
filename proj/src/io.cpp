#include "pse/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pse {

namespace {

Json vec_to_json(const Vec& v, int dim) {
  Json a = Json::array();
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const Json& a) {
  Vec v;
  if (!a.is_array() || a.empty() || a.size() > 3)
    throw std::invalid_argument("expected a coordinate array of length 1..3");
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

Json pointset_to_json(const PointSet& P) {
  Json j;
  j["dim"] = P.dim();
  j["r"] = P.r();
  j["mode"] = P.mode() == CoordMode::Int ? "int" : "float";
  j["window"] = {{"lo", vec_to_json(P.window().lo, P.dim())},
                 {"hi", vec_to_json(P.window().hi, P.dim())}};
  Json pts = Json::array();
  for (const Vec& p : P.points()) pts.push_back(vec_to_json(p, P.dim()));
  j["points"] = pts;
  return j;
}

PointSet pointset_from_json(const Json& j) {
  int dim = j.at("dim").get<int>();
  double r = j.at("r").get<double>();
  CoordMode mode = j.at("mode").get<std::string>() == "int" ? CoordMode::Int : CoordMode::Float;
  Box window = Box::of(vec_from_json(j.at("window").at("lo")),
                       vec_from_json(j.at("window").at("hi")), dim);
  std::vector<Vec> pts;
  for (const Json& p : j.at("points")) pts.push_back(vec_from_json(p));
  return PointSet(std::move(pts), r, window, mode);
}

Json pattern_to_json(const Pattern& Q) {
  Json j;
  j["dim"] = Q.dim;
  j["r"] = Q.source_r;
  j["mode"] = Q.mode == CoordMode::Int ? "int" : "float";
  Json pts = Json::array();
  for (const Vec& p : Q.points) pts.push_back(vec_to_json(p, Q.dim));
  j["points"] = pts;
  return j;
}

Pattern pattern_from_json(const Json& j) {
  Pattern q;
  q.dim = j.at("dim").get<int>();
  q.source_r = j.value("r", 1.0);
  q.mode = j.value("mode", std::string("int")) == "int" ? CoordMode::Int : CoordMode::Float;
  for (const Json& p : j.at("points")) q.points.push_back(vec_from_json(p));
  return q;
}

Json graph_to_json(const Graph& G) {
  Json j;
  j["dim"] = G.dim();
  j["r"] = G.r();
  Json verts = Json::array();
  for (const Vec& v : G.vertices().points()) verts.push_back(vec_to_json(v, G.dim()));
  j["vertices"] = verts;
  Json edges = Json::array();
  for (const auto& [a, b] : G.edges()) edges.push_back(Json::array({a, b}));
  j["edges"] = edges;
  j["window"] = {{"lo", vec_to_json(G.vertices().window().lo, G.dim())},
                 {"hi", vec_to_json(G.vertices().window().hi, G.dim())}};
  return j;
}

Graph graph_from_json(const Json& j) {
  std::vector<Vec> verts;
  for (const Json& v : j.at("vertices")) verts.push_back(vec_from_json(v));
  int dim = j.value("dim", verts.empty() ? 2 : static_cast<int>(j.at("vertices")[0].size()));
  double r = j.at("r").get<double>();
  Box window;
  if (j.contains("window")) {
    window = Box::of(vec_from_json(j.at("window").at("lo")),
                     vec_from_json(j.at("window").at("hi")), dim);
  } else {
    window.dim = dim;
    if (!verts.empty()) {
      window.lo = window.hi = verts[0];
      for (const Vec& v : verts)
        for (int i = 0; i < dim; ++i) {
          window.lo[i] = std::min(window.lo[i], v[i]);
          window.hi[i] = std::max(window.hi[i], v[i]);
        }
    }
  }
  bool integral = true;
  for (const Vec& v : verts)
    for (int i = 0; i < dim; ++i)
      if (v[i] != std::floor(v[i])) integral = false;
  PointSet vertices(std::move(verts), r, window, integral ? CoordMode::Int : CoordMode::Float);
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (const Json& e : j.at("edges"))
    edges.push_back({e.at(0).get<uint32_t>(), e.at(1).get<uint32_t>()});
  return Graph(std::move(vertices), std::move(edges));
}

GroupSpec group_from_json(const Json& j) {
  std::string s = j.get<std::string>();
  if (s == "R1") return GroupSpec::translation(1);
  if (s == "R2") return GroupSpec::translation(2);
  if (s == "R3") return GroupSpec::translation(3);
  if (s == "E2") return GroupSpec::euclidean2();
  throw std::invalid_argument("group must be one of R1, R2, R3, E2");
}

std::string group_to_string(const GroupSpec& g) {
  if (g.rotational()) return "E2";
  return "R" + std::to_string(g.dim);
}

WindowSequence windows_from_json(const GroupSpec& g, const Json& j) {
  std::string shape = j.value("shape", g.rotational() ? std::string("ball") : std::string("box"));
  std::vector<double> radii;
  for (const Json& r : j.at("radii")) radii.push_back(r.get<double>());
  return WindowSequence::make(g, shape == "ball" ? WindowShape::Ball : WindowShape::Box, radii);
}

GeneratorSpec generator_from_json(const Json& j) {
  GeneratorSpec spec;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "lattice")
    spec.kind = GeneratorKind::Lattice;
  else if (kind == "fibonacci")
    spec.kind = GeneratorKind::Fibonacci;
  else if (kind == "silver_chain")
    spec.kind = GeneratorKind::SilverChain;
  else if (kind == "grid_graph")
    spec.kind = GeneratorKind::GridGraph;
  else if (kind == "rotated_union")
    spec.kind = GeneratorKind::RotatedUnion;
  else if (kind == "jittered_lattice")
    spec.kind = GeneratorKind::JitteredLattice;
  else
    throw std::invalid_argument("unknown generator kind: " + kind);
  spec.dim = j.value("dim", 2);
  spec.window_half_extent = j.value("window", 50.0);
  spec.length = j.value("length", 10000LL);
  spec.grid_n = j.value("n", 10);
  spec.jitter_amplitude = j.value("amplitude", 0.1);
  spec.seed = j.value("seed", 1ULL);
  if (j.contains("angles"))
    for (const Json& a : j.at("angles")) spec.angles.push_back(a.get<double>());
  if (j.contains("basis")) {
    std::array<Vec, 3> basis{Vec(1, 0, 0), Vec(0, 1, 0), Vec(0, 0, 1)};
    const Json& b = j.at("basis");
    for (size_t i = 0; i < b.size() && i < 3; ++i) basis[i] = vec_from_json(b[i]);
    spec.basis = basis;
  }
  return spec;
}

Marginal marginal_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "bernoulli") return Marginal::bernoulli(j.at("p").get<double>());
  if (kind == "finite") {
    std::vector<double> probs;
    for (const Json& p : j.at("probs")) probs.push_back(p.get<double>());
    return Marginal::finite(probs);
  }
  if (kind == "uniform")
    return Marginal::uniform_real(j.at("lo").get<double>(), j.at("hi").get<double>());
  throw std::invalid_argument("unknown marginal kind: " + kind);
}

ColourLaw law_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid") return ColourLaw::iid(marginal_from_json(j.at("marginal")));
  if (kind == "ma") {
    auto combine = j.value("combine", std::string("threshold")) == "mean"
                       ? ColourLaw::Combine::Mean
                       : ColourLaw::Combine::Threshold;
    return ColourLaw::moving_average(marginal_from_json(j.at("marginal")),
                                     j.at("range").get<double>(), combine,
                                     j.value("threshold", 0.5));
  }
  throw std::invalid_argument("unknown law kind: " + kind);
}

ColourProfile colour_profile_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "one") return ColourProfile::one();
  if (kind == "labels") {
    std::set<int> labels;
    for (const Json& l : j.at("labels")) labels.insert(l.get<int>());
    return ColourProfile::indicator_labels(labels);
  }
  if (kind == "range")
    return ColourProfile::indicator_range(j.at("lo").get<double>(), j.at("hi").get<double>());
  throw std::invalid_argument("unknown colour profile kind: " + kind);
}

Profile profile_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  Vec c = j.contains("center") ? vec_from_json(j.at("center")) : Vec();
  double radius = j.at("radius").get<double>();
  if (kind == "box") return Profile::indicator_box(c, radius);
  if (kind == "ball") return Profile::indicator_ball(c, radius);
  if (kind == "tent") return Profile::tent(c, radius);
  throw std::invalid_argument("unknown profile kind: " + kind);
}

ScanningFunction scanning_function_from_json(const Json& j) {
  ScanningFunction f;
  for (const Json& fac : j.at("factors")) {
    ScanningFunction::Factor factor{profile_from_json(fac.at("phi")), std::nullopt};
    if (fac.contains("psi")) factor.psi = colour_profile_from_json(fac.at("psi"));
    f.factors.push_back(std::move(factor));
  }
  return f;
}

PointSet pointset_from_csv(const std::string& path, double r, CoordMode mode, double margin) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Vec> pts;
  int dim = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    Vec v;
    int d = 0;
    std::string cell;
    while (std::getline(ss, cell, ',') && d < 3) v[d++] = std::stod(cell);
    if (dim == 0) dim = d;
    if (d != dim) throw std::runtime_error("inconsistent CSV row width");
    pts.push_back(v);
  }
  if (pts.empty()) throw std::runtime_error("empty CSV point file");
  Box window;
  window.dim = dim;
  window.lo = window.hi = pts[0];
  for (const Vec& p : pts)
    for (int i = 0; i < dim; ++i) {
      window.lo[i] = std::min(window.lo[i], p[i]);
      window.hi[i] = std::max(window.hi[i], p[i]);
    }
  window = window.inflated(margin);
  return PointSet(std::move(pts), r, window, mode);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string config_hash(const Json& config) {
  std::string dump = config.dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace pse
