#include "pse/colouring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pse {

Marginal Marginal::finite(std::vector<double> probs) {
  if (probs.empty()) throw std::invalid_argument("Marginal: empty alphabet");
  double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (!(sum > 0.0)) throw std::invalid_argument("Marginal: weights must sum to > 0");
  for (double& p : probs) p /= sum;
  Marginal m;
  m.kind = Kind::Finite;
  m.probs = std::move(probs);
  return m;
}

Marginal Marginal::uniform_real(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("Marginal: degenerate interval");
  Marginal m;
  m.kind = Kind::UniformReal;
  m.lo = lo;
  m.hi = hi;
  return m;
}

double Marginal::sample(CounterRng& rng) const {
  if (kind == Kind::Finite) return static_cast<double>(rng.categorical(probs));
  return rng.uniform(lo, hi);
}

ColourProfile ColourProfile::indicator_labels(std::set<int> labels) {
  ColourProfile p;
  p.kind = Kind::IndicatorLabels;
  p.labels = std::move(labels);
  return p;
}

ColourProfile ColourProfile::indicator_range(double lo, double hi) {
  ColourProfile p;
  p.kind = Kind::IndicatorRange;
  p.lo = lo;
  p.hi = hi;
  return p;
}

double ColourProfile::eval(double colour) const {
  switch (kind) {
    case Kind::One: return 1.0;
    case Kind::IndicatorLabels:
      return labels.count(static_cast<int>(std::lround(colour))) ? 1.0 : 0.0;
    case Kind::IndicatorRange: return colour >= lo && colour <= hi ? 1.0 : 0.0;
  }
  return 0.0;
}

double ColourProfile::expectation(const Marginal& m) const {
  if (kind == Kind::One) return 1.0;
  if (m.kind == Marginal::Kind::Finite) {
    double e = 0.0;
    for (size_t l = 0; l < m.probs.size(); ++l)
      e += m.probs[l] * eval(static_cast<double>(l));
    return e;
  }
  if (kind == Kind::IndicatorRange) {
    double a = std::max(lo, m.lo), b = std::min(hi, m.hi);
    return std::max(0.0, b - a) / (m.hi - m.lo);
  }
  // Label indicators against a continuous marginal: mass of the matching
  // unit-rounded cells.
  double e = 0.0;
  for (int l : labels) {
    double a = std::max(m.lo, static_cast<double>(l) - 0.5);
    double b = std::min(m.hi, static_cast<double>(l) + 0.5);
    e += std::max(0.0, b - a) / (m.hi - m.lo);
  }
  return e;
}

ColourLaw ColourLaw::moving_average(Marginal noise, double range, Combine combine,
                                    double threshold) {
  if (!(range > 0.0)) throw std::invalid_argument("ColourLaw: range must be > 0");
  ColourLaw law;
  law.kind = Kind::MovingAverage;
  law.marginal = std::move(noise);
  law.range = range;
  law.combine = combine;
  law.threshold = threshold;
  return law;
}

namespace {

std::vector<uint32_t> lex_order(const PointSet& P) {
  std::vector<uint32_t> order(P.size());
  std::iota(order.begin(), order.end(), 0u);
  double tol = P.tol();
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return lex_less(P.points()[a], P.points()[b], tol);
  });
  return order;
}

/// Noise field value on grid node c (integer cell coordinates).
double noise_at(const Marginal& noise, uint64_t seed, int64_t cx, int64_t cy, int64_t cz) {
  CounterRng rng(seed, 0x4E01, CounterRng::key(static_cast<uint64_t>(cx),
                                               static_cast<uint64_t>(cy),
                                               static_cast<uint64_t>(cz)));
  return noise.sample(rng);
}

double moving_average_colour(const PointSet& P, const ColourLaw& law, uint64_t seed,
                             const Vec& p) {
  double pitch = law.range / 4.0;
  double kernel = law.range / 2.0;
  int64_t clo[3] = {0, 0, 0}, chi[3] = {0, 0, 0};
  for (int i = 0; i < P.dim(); ++i) {
    clo[i] = static_cast<int64_t>(std::floor((p[i] - kernel) / pitch));
    chi[i] = static_cast<int64_t>(std::ceil((p[i] + kernel) / pitch));
  }
  double sum = 0.0;
  long long n = 0;
  for (int64_t cx = clo[0]; cx <= chi[0]; ++cx)
    for (int64_t cy = clo[1]; cy <= chi[1]; ++cy)
      for (int64_t cz = clo[2]; cz <= chi[2]; ++cz) {
        Vec node(static_cast<double>(cx) * pitch,
                 P.dim() > 1 ? static_cast<double>(cy) * pitch : 0.0,
                 P.dim() > 2 ? static_cast<double>(cz) * pitch : 0.0);
        if (dist(node, p) > kernel) continue;
        sum += noise_at(law.marginal, seed, cx, P.dim() > 1 ? cy : 0, P.dim() > 2 ? cz : 0);
        ++n;
      }
  double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
  if (law.combine == ColourLaw::Combine::Threshold) return mean >= law.threshold ? 1.0 : 0.0;
  return mean;
}

}  // namespace

ColouredPointSet sample_colours(const PointSet& P, const ColourLaw& law, uint64_t seed) {
  std::vector<double> colours(P.size(), 0.0);
  if (law.is_iid()) {
    auto order = lex_order(P);
    for (size_t rank = 0; rank < order.size(); ++rank) {
      CounterRng rng(seed, 0xC01, rank);
      colours[order[rank]] = law.marginal.sample(rng);
    }
  } else {
    for (size_t i = 0; i < P.size(); ++i)
      colours[i] = moving_average_colour(P, law, seed, P.points()[i]);
  }
  return ColouredPointSet{P, std::move(colours)};
}

ColouredPointSet shift_colouring(const GroupElement& x, const ColouredPointSet& Pw) {
  const PointSet& P = Pw.base;
  std::vector<Vec> moved;
  moved.reserve(P.size());
  for (const Vec& p : P.points()) moved.push_back(act(x, p));
  Box window;
  if (x.angle == 0.0) {
    window = P.window().translated(x.translation);
  } else {
    // Bounding box of the rotated window corners.
    const Box& W = P.window();
    window.dim = W.dim;
    bool first = true;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy) {
        Vec corner(cx ? W.hi[0] : W.lo[0], cy ? W.hi[1] : W.lo[1], 0.0);
        Vec m = act(x, corner);
        if (first) {
          window.lo = window.hi = m;
          first = false;
        } else {
          for (int i = 0; i < W.dim; ++i) {
            window.lo[i] = std::min(window.lo[i], m[i]);
            window.hi[i] = std::max(window.hi[i], m[i]);
          }
        }
      }
  }
  PointSet base(std::move(moved), P.r(), window, P.mode(), P.tol() > 0 ? P.tol() : kTolMatch);
  return ColouredPointSet{std::move(base), Pw.colours};
}

}  // namespace pse
