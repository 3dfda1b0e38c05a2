#ifndef QCMOD_CURVES_HPP
#define QCMOD_CURVES_HPP

// Polyline curves and finite curve families.
//
// Line integrals of piecewise-constant densities are computed exactly by
// clipping every segment against the grid planes, so a curve contributes
// (length inside cell) * (cell value) for each cell it crosses.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qcmod/domain.hpp"
#include "qcmod/errors.hpp"
#include "qcmod/grid.hpp"
#include "qcmod/linalg.hpp"
#include "qcmod/maps.hpp"

namespace qcmod {

template <std::size_t N>
class Polyline {
 public:
  explicit Polyline(std::vector<Point<N>> vertices) : v_(std::move(vertices)) {
    if (v_.size() < 2) throw InvalidInput("polyline: need at least two vertices");
    s_.resize(v_.size());
    s_[0] = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      if (!is_finite(v_[i])) throw InvalidInput("polyline: non-finite vertex");
      if (i == 0) continue;
      const double d = distance(v_[i - 1], v_[i]);
      if (!(d > 0.0)) throw InvalidInput("polyline: repeated consecutive vertex");
      s_[i] = s_[i - 1] + d;
    }
  }

  const std::vector<Point<N>>& vertices() const { return v_; }
  const std::vector<double>& cumulative() const { return s_; }
  std::size_t size() const { return v_.size(); }
  double length() const { return s_.back(); }
  const Point<N>& front() const { return v_.front(); }
  const Point<N>& back() const { return v_.back(); }

  // Point at arc length s, clamped to [0, length].
  Point<N> at(double s) const {
    if (s <= 0.0) return v_.front();
    if (s >= length()) return v_.back();
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - s_.begin());
    const double t = (s - s_[i - 1]) / (s_[i] - s_[i - 1]);
    return v_[i - 1] + t * (v_[i] - v_[i - 1]);
  }

  Polyline scaled(double c) const {
    std::vector<Point<N>> w = v_;
    for (auto& p : w) p *= c;
    return Polyline(std::move(w));
  }

 private:
  std::vector<Point<N>> v_;
  std::vector<double> s_;
};

template <std::size_t N>
double arc_length(const Polyline<N>& g) {
  return g.length();
}

// Resamples at equal arc-length spacing `step`; the last segment is shorter
// unless the length is a multiple of the step.
template <std::size_t N>
Polyline<N> normal_representation(const Polyline<N>& g, double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("normal_representation: step must be > 0");
  const double total = g.length();
  std::vector<Point<N>> out;
  const auto full = static_cast<std::size_t>(std::floor(total / step));
  out.reserve(full + 2);
  for (std::size_t k = 0; k <= full; ++k) out.push_back(g.at(k * step));
  const double rest = total - full * step;
  if (rest > 1e-9 * step) {
    out.push_back(g.back());
  } else {
    out.back() = g.back();
  }
  if (out.size() < 2) out.push_back(g.back());
  return Polyline<N>(std::move(out));
}

template <std::size_t N>
Polyline<N> concatenate(const Polyline<N>& a, const Polyline<N>& b) {
  std::vector<Point<N>> v = a.vertices();
  const auto& w = b.vertices();
  std::size_t start = distance(v.back(), w.front()) > 0.0 ? 0 : 1;
  v.insert(v.end(), w.begin() + static_cast<std::ptrdiff_t>(start), w.end());
  return Polyline<N>(std::move(v));
}

struct CellCrossing {
  std::size_t cell;
  double length;
};

// Length of the curve inside each grid cell, sorted by cell index.
template <std::size_t N>
std::vector<CellCrossing> cell_lengths(const UniformGrid<N>& grid, const Polyline<N>& g) {
  std::vector<CellCrossing> raw;
  std::vector<double> ts;
  const auto& v = g.vertices();
  for (std::size_t seg = 0; seg + 1 < v.size(); ++seg) {
    const Point<N>& a = v[seg];
    const Point<N>& b = v[seg + 1];
    const double len = distance(a, b);
    ts.clear();
    ts.push_back(0.0);
    ts.push_back(1.0);
    for (std::size_t i = 0; i < N; ++i) {
      const double da = (a[i] - grid.lower()[i]) / grid.cell_size(i);
      const double db = (b[i] - grid.lower()[i]) / grid.cell_size(i);
      if (da == db) continue;
      const double lo = std::min(da, db), hi = std::max(da, db);
      for (double k = std::floor(lo) + 1.0; k < hi; k += 1.0) {
        ts.push_back((k - da) / (db - da));
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t j = 0; j + 1 < ts.size(); ++j) {
      const double t0 = ts[j], t1 = ts[j + 1];
      if (!(t1 - t0 > 1e-14)) continue;
      const Point<N> mid = a + (0.5 * (t0 + t1)) * (b - a);
      const auto cell = grid.locate(mid);
      if (!cell) throw DomainError("line integral: curve leaves the grid");
      raw.push_back({*cell, (t1 - t0) * len});
    }
  }
  std::sort(raw.begin(), raw.end(), [](const CellCrossing& x, const CellCrossing& y) {
    return x.cell < y.cell;
  });
  std::vector<CellCrossing> merged;
  for (const auto& c : raw) {
    if (!merged.empty() && merged.back().cell == c.cell) {
      merged.back().length += c.length;
    } else {
      merged.push_back(c);
    }
  }
  return merged;
}

// \int_gamma rho |dx|
template <std::size_t N>
double line_integral(const DensityField<N>& rho, const Polyline<N>& g) {
  double s = 0.0;
  for (const auto& c : cell_lengths(rho.grid(), g)) s += rho[c.cell] * c.length;
  return s;
}

enum class FamilyGenerator { radial, pullback, grid_paths, mixed, loaded };

inline const char* to_string(FamilyGenerator g) {
  switch (g) {
    case FamilyGenerator::radial: return "radial";
    case FamilyGenerator::pullback: return "pullback";
    case FamilyGenerator::grid_paths: return "grid-paths";
    case FamilyGenerator::mixed: return "mixed";
    case FamilyGenerator::loaded: return "loaded";
  }
  return "?";
}

template <std::size_t N>
struct CurveFamily {
  std::vector<Polyline<N>> curves;
  FamilyGenerator generator = FamilyGenerator::radial;
  std::string target;

  // Pullback bookkeeping.
  std::size_t dropped_breaks = 0;
  std::size_t dropped_branch = 0;
  std::size_t inexact_fibers = 0;
  // Grid-path bookkeeping: E and F not connected inside the domain.
  bool disconnected = false;

  bool empty() const { return curves.empty(); }
  std::size_t size() const { return curves.size(); }

  CurveFamily& append(const CurveFamily& other) {
    curves.insert(curves.end(), other.curves.begin(), other.curves.end());
    if (generator != other.generator) generator = FamilyGenerator::mixed;
    target = target.empty() ? other.target : target + " + " + other.target;
    dropped_breaks += other.dropped_breaks;
    dropped_branch += other.dropped_branch;
    inexact_fibers += other.inexact_fibers;
    disconnected = disconnected || other.disconnected;
    return *this;
  }
};

struct AdmissibilityReport {
  double pass_fraction = 0.0;
  double min_integral = 0.0;
  std::size_t curves = 0;
  std::size_t passed = 0;
};

template <std::size_t N>
AdmissibilityReport is_admissible(const DensityField<N>& rho, const CurveFamily<N>& family,
                                  double slack) {
  AdmissibilityReport r;
  r.curves = family.size();
  if (family.empty()) return r;
  r.min_integral = std::numeric_limits<double>::infinity();
  for (const auto& g : family.curves) {
    const double v = line_integral(rho, g);
    r.min_integral = std::min(r.min_integral, v);
    if (v >= 1.0 - slack) ++r.passed;
  }
  r.pass_fraction = static_cast<double>(r.passed) / static_cast<double>(r.curves);
  return r;
}

namespace detail {

// Evenly spread unit directions: uniform angles in the plane, a Fibonacci
// lattice on the 2-sphere.
template <std::size_t N>
std::vector<Vector<N>> sphere_directions(std::size_t count) {
  std::vector<Vector<N>> dirs;
  dirs.reserve(count);
  if constexpr (N == 2) {
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      // Snap the axis directions so that count = 4 gives exact +-e1, +-e2.
      double c = std::cos(t), s = std::sin(t);
      if (std::abs(c) < 1e-15) c = 0.0;
      if (std::abs(s) < 1e-15) s = 0.0;
      dirs.push_back(Vector<2>{c, s});
    }
  } else if constexpr (N == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
      const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(k);
      dirs.push_back(Vector<3>{r * std::cos(phi), r * std::sin(phi), z});
    }
  } else {
    throw ConfigError("radial family: only dimensions 2 and 3 are supported");
  }
  return dirs;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double unit_hash(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = splitmix64(a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  h = splitmix64(h ^ d);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

// `count` straight segments from S(y0, r1) to S(y0, r2), each split into
// `segments` equal pieces.
template <std::size_t N>
CurveFamily<N> radial_family(const Point<N>& y0, double r1, double r2, std::size_t count,
                             std::size_t segments = 1) {
  if (!(r1 > 0.0) || !(r2 > r1) || !std::isfinite(r2)) throw ConfigError("radial family: need 0 < r1 < r2");
  if (count == 0) throw ConfigError("radial family: count must be >= 1");
  if (segments == 0) throw ConfigError("radial family: segments must be >= 1");
  CurveFamily<N> fam;
  fam.generator = FamilyGenerator::radial;
  fam.target = "Gamma(S(y0,r1), S(y0,r2), A(y0,r1,r2))";
  for (const auto& d : detail::sphere_directions<N>(count)) {
    std::vector<Point<N>> v;
    v.reserve(segments + 1);
    for (std::size_t j = 0; j <= segments; ++j) {
      const double r = j == segments ? r2 : r1 + (r2 - r1) * static_cast<double>(j) / static_cast<double>(segments);
      v.push_back(y0 + r * d);
    }
    fam.curves.emplace_back(std::move(v));
  }
  return fam;
}

struct PullbackOptions {
  // Largest allowed jump between consecutive lifted vertices; image segments
  // are bisected until every lifted step is below it.
  double continuity_tolerance = 1e-3;
  // Lifts passing this close to the branch locus are discarded.
  double branch_exclusion = 1e-3;
  int max_bisections = 24;
};

namespace detail {

template <std::size_t N>
bool lift_segment(const SmoothMap<N>& f, const Point<N>& a, const Point<N>& b, Point<N>& prev,
                  std::vector<Point<N>>& out, const PullbackOptions& opt, int depth,
                  std::size_t& inexact) {
  const auto fiber = f.preimages(b);
  if (!fiber.exact) ++inexact;
  double best = std::numeric_limits<double>::infinity();
  const Point<N>* q = nullptr;
  for (const auto& x : fiber.points) {
    const double d = distance(x, prev);
    if (d < best) {
      best = d;
      q = &x;
    }
  }
  if (q != nullptr && best <= opt.continuity_tolerance) {
    if (best > 0.0) out.push_back(*q);
    prev = *q;
    return true;
  }
  if (depth >= opt.max_bisections) return false;
  const Point<N> mid = 0.5 * (a + b);
  return lift_segment(f, a, mid, prev, out, opt, depth + 1, inexact) &&
         lift_segment(f, mid, b, prev, out, opt, depth + 1, inexact);
}

}  // namespace detail

// All lifts of the image curves through the branches of f^-1, continued by
// nearest-preimage tracking. f(lift) reproduces the (refined) image polyline.
template <std::size_t N>
CurveFamily<N> pullback_family(const SmoothMap<N>& f, const CurveFamily<N>& image,
                               const PullbackOptions& opt = {}) {
  if (f.preimage_mode() == PreimageMode::none) throw ConfigError("pullback: map has no preimages");
  CurveFamily<N> out;
  out.generator = FamilyGenerator::pullback;
  out.target = "Gamma_f lifts of " + (image.target.empty() ? std::string("image family") : image.target);
  for (const auto& g : image.curves) {
    const auto& iv = g.vertices();
    const auto starts = f.preimages(iv.front());
    if (!starts.exact) ++out.inexact_fibers;
    for (const auto& s : starts.points) {
      std::vector<Point<N>> lift{s};
      Point<N> prev = s;
      bool ok = true;
      for (std::size_t j = 0; j + 1 < iv.size() && ok; ++j) {
        ok = detail::lift_segment(f, iv[j], iv[j + 1], prev, lift, opt, 0, out.inexact_fibers);
      }
      if (!ok || lift.size() < 2) {
        ++out.dropped_breaks;
        continue;
      }
      const bool near_branch = std::any_of(lift.begin(), lift.end(), [&](const Point<N>& x) {
        return f.distance_to_branch_locus(x) < opt.branch_exclusion;
      });
      if (near_branch) {
        ++out.dropped_branch;
        continue;
      }
      out.curves.emplace_back(std::move(lift));
    }
  }
  return out;
}

// Distinct cell paths from E to F through cells whose centers lie in the
// domain, found by Dijkstra under randomized (seeded) edge weights.
template <std::size_t N>
CurveFamily<N> grid_paths_family(const DomainDescriptor<N>& domain, const std::vector<std::size_t>& e_cells,
                                 const std::vector<std::size_t>& f_cells, const UniformGrid<N>& grid,
                                 std::size_t count, std::uint64_t seed) {
  if (e_cells.empty() || f_cells.empty()) throw ConfigError("grid paths: E and F must be nonempty");
  CurveFamily<N> fam;
  fam.generator = FamilyGenerator::grid_paths;
  fam.target = "Gamma(E, F, D) on grid";
  const std::size_t total = grid.cell_count();
  std::vector<char> inside(total, 0), is_target(total, 0);
  for (std::size_t c = 0; c < total; ++c) inside[c] = domain.contains(grid.center(c)) ? 1 : 0;
  for (auto c : f_cells) is_target[c] = inside[c];

  std::vector<std::array<int, N>> offsets;
  {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < N; ++i) combos *= 3;
    for (std::size_t m = 0; m < combos; ++m) {
      std::array<int, N> o;
      std::size_t rem = m;
      bool zero = true;
      for (std::size_t i = 0; i < N; ++i) {
        o[i] = static_cast<int>(rem % 3) - 1;
        rem /= 3;
        zero = zero && o[i] == 0;
      }
      if (!zero) offsets.push_back(o);
    }
  }

  std::set<std::vector<std::size_t>> seen;
  std::vector<double> dist(total);
  std::vector<std::size_t> parent(total);
  const std::size_t attempts = 4 * count + 4;
  using Item = std::pair<double, std::size_t>;
  for (std::size_t search = 0; search < attempts && fam.curves.size() < count; ++search) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(parent.begin(), parent.end(), total);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (auto c : e_cells) {
      if (!inside[c]) continue;
      dist[c] = 0.0;
      pq.push({0.0, c});
    }
    std::size_t reached = total;
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      if (is_target[u]) {
        reached = u;
        break;
      }
      const auto iu = grid.multi(u);
      const Point<N> cu = grid.center(u);
      for (const auto& o : offsets) {
        std::array<std::size_t, N> iv;
        bool ok = true;
        for (std::size_t i = 0; i < N && ok; ++i) {
          const long long k = static_cast<long long>(iu[i]) + o[i];
          ok = k >= 0 && k < static_cast<long long>(grid.count(i));
          iv[i] = static_cast<std::size_t>(k);
        }
        if (!ok) continue;
        const std::size_t v = grid.linear(iv);
        if (!inside[v]) continue;
        const double w = distance(cu, grid.center(v)) *
                         (0.5 + detail::unit_hash(seed, search, std::min(u, v), std::max(u, v)));
        if (d + w < dist[v]) {
          dist[v] = d + w;
          parent[v] = u;
          pq.push({dist[v], v});
        }
      }
    }
    if (reached == total) {
      fam.disconnected = true;
      fam.curves.clear();
      return fam;
    }
    std::vector<std::size_t> path;
    for (std::size_t c = reached; c != total; c = parent[c]) path.push_back(c);
    std::reverse(path.begin(), path.end());
    if (path.size() < 2 || !seen.insert(path).second) continue;
    std::vector<Point<N>> verts;
    verts.reserve(path.size());
    for (auto c : path) verts.push_back(grid.center(c));
    fam.curves.emplace_back(std::move(verts));
  }
  return fam;
}

// Grid paths inside the annulus A(y0, r1, r2) from the cells touching the
// inner sphere to those touching the outer one, extended radially onto both
// spheres.
template <std::size_t N>
CurveFamily<N> annulus_grid_paths(const Point<N>& y0, double r1, double r2, std::size_t cells_per_axis,
                                  std::size_t count, std::uint64_t seed) {
  const auto ann = DomainDescriptor<N>::annulus(y0, r1, r2);
  const auto [lo, hi] = ann.bounding_box();
  const UniformGrid<N> grid(lo, hi, cells_per_axis);
  const double h = grid.max_cell_size();
  std::vector<std::size_t> e, f;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Point<N> x = grid.center(c);
    if (!ann.contains(x)) continue;
    const double r = distance(x, y0);
    if (r < r1 + h) e.push_back(c);
    if (r > r2 - h) f.push_back(c);
  }
  if (e.empty() || f.empty()) throw ConfigError("annulus grid paths: grid too coarse for the ring");
  auto fam = grid_paths_family(ann, e, f, grid, count, seed);
  // Close the gap to the boundary spheres with radial end pieces so that
  // every path connects S(y0, r1) to S(y0, r2).
  for (auto& g : fam.curves) {
    std::vector<Point<N>> v = g.vertices();
    const Point<N> head = y0 + r1 * direction(y0, v.front());
    const Point<N> tail = y0 + r2 * direction(y0, v.back());
    if (distance(head, v.front()) > 0.0) v.insert(v.begin(), head);
    if (distance(tail, v.back()) > 0.0) v.push_back(tail);
    g = Polyline<N>(std::move(v));
  }
  fam.target = "Gamma(S(y0,r1), S(y0,r2), A(y0,r1,r2)) grid paths";
  return fam;
}

// Text format: '#'-prefixed header lines, then one curve per line with all
// vertex coordinates comma-separated (x1,y1,x2,y2,...).
template <std::size_t N>
void write_family(std::ostream& os, const CurveFamily<N>& fam) {
  os << "# qcmod-curves 1\n";
  os << "# dimension " << N << '\n';
  os << "# generator " << to_string(fam.generator) << '\n';
  char buf[32];
  for (const auto& g : fam.curves) {
    bool first = true;
    for (const auto& p : g.vertices()) {
      for (std::size_t i = 0; i < N; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", p[i]);
        os << (first ? "" : ",") << buf;
        first = false;
      }
    }
    os << '\n';
  }
}

template <std::size_t N>
CurveFamily<N> read_family(std::istream& is) {
  CurveFamily<N> fam;
  fam.generator = FamilyGenerator::loaded;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "dimension") {
        std::size_t d = 0;
        hs >> d;
        if (d != N) throw ConfigError("curve file: dimension mismatch");
      }
      continue;
    }
    std::vector<double> xs;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      try {
        std::size_t used = 0;
        xs.push_back(std::stod(tok, &used));
      } catch (const std::exception&) {
        throw ConfigError("curve file: bad number on line " + std::to_string(lineno));
      }
    }
    if (xs.size() % N != 0) throw ConfigError("curve file: coordinate count not a multiple of the dimension");
    std::vector<Point<N>> v(xs.size() / N);
    for (std::size_t k = 0; k < v.size(); ++k)
      for (std::size_t i = 0; i < N; ++i) v[k][i] = xs[k * N + i];
    fam.curves.emplace_back(std::move(v));
  }
  return fam;
}

}  // namespace qcmod

#endif  // QCMOD_CURVES_HPP
