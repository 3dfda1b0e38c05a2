#ifndef QCMOD_MODULUS_HPP
#define QCMOD_MODULUS_HPP

// p-modulus of curve families and the two sides of the inverse Poletsky
// inequality
//
//   M_p(Gamma_f(y0, r1, r2)) <= \int_{A(y0,r1,r2) cap f(D)} K_CT,p,y0(y, f) eta^p(|y - y0|) dm(y)
//
// for every eta >= 0 on (r1, r2) with \int eta >= 1.
//
// The right-hand side is computed twice: over the image annulus on a polar
// (spherical) product grid, and over the domain as \int_D rho^p with
//
//   rho(x) = eta(|f(x) - y0|) sup_{|h|=1} |(f'(x) h, (f(x)-y0)/|f(x)-y0|)|
//
// on the preimage of the annulus and 0 elsewhere. The change of variables
// x -> f(x) on each sheet makes the two equal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "qcmod/curves.hpp"
#include "qcmod/dilatation.hpp"
#include "qcmod/errors.hpp"
#include "qcmod/grid.hpp"
#include "qcmod/linalg.hpp"
#include "qcmod/maps.hpp"

namespace qcmod {

// Surface area of the unit (n-1)-sphere.
inline double sphere_area(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

namespace detail {

inline void require_ring(std::size_t n, double p, double r1, double r2) {
  if (n < 2) throw ConfigError("dimension must be >= 2");
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("order p must satisfy p > 1");
  if (!(r1 > 0.0) || !(r2 > r1) || !std::isfinite(r2)) throw ConfigError("radii must satisfy 0 < r1 < r2");
}

// \int_{r1}^{r2} t^a dt
inline double power_integral(double a, double r1, double r2) {
  if (std::abs(a + 1.0) < 1e-14) return std::log(r2 / r1);
  return (std::pow(r2, a + 1.0) - std::pow(r1, a + 1.0)) / (a + 1.0);
}

}  // namespace detail

// Exact p-modulus of the family joining the boundary spheres of a ring:
// omega_{n-1} (\int_{r1}^{r2} t^{(1-n)/(p-1)} dt)^{1-p}.
inline double ring_modulus_analytic(std::size_t n, double p, double r1, double r2) {
  detail::require_ring(n, p, r1, r2);
  const double a = (1.0 - static_cast<double>(n)) / (p - 1.0);
  return sphere_area(n) * std::pow(detail::power_integral(a, r1, r2), 1.0 - p);
}

// Radial test function eta on (r1, r2); evaluates to 0 outside the interval.
class EtaFunction {
 public:
  struct Power {
    double exponent;
    double coefficient;
  };
  struct Tabulated {
    std::vector<double> nodes;
    std::vector<double> values;
  };

  static EtaFunction power(double r1, double r2, double exponent, double coefficient) {
    EtaFunction e(r1, r2);
    e.profile_ = Power{exponent, coefficient};
    e.validate();
    return e;
  }

  // Piecewise linear through (nodes[i], values[i]); nodes must span [r1, r2].
  static EtaFunction tabulated(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size()) {
      throw ConfigError("eta: need matching node and value tables with >= 2 entries");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!std::isfinite(nodes[i]) || !(values[i] >= 0.0) || !std::isfinite(values[i])) {
        throw ConfigError("eta: values must be finite and >= 0");
      }
      if (i > 0 && !(nodes[i] > nodes[i - 1])) throw ConfigError("eta: nodes must increase");
    }
    EtaFunction e(nodes.front(), nodes.back());
    e.profile_ = Tabulated{std::move(nodes), std::move(values)};
    e.validate();
    return e;
  }

  double r1() const { return r1_; }
  double r2() const { return r2_; }
  bool is_power() const { return std::holds_alternative<Power>(profile_); }

  double operator()(double r) const {
    if (!(r > r1_) || !(r < r2_)) return 0.0;
    if (const auto* pw = std::get_if<Power>(&profile_)) {
      return pw->coefficient * std::pow(r, pw->exponent);
    }
    const auto& t = std::get<Tabulated>(profile_);
    const auto it = std::upper_bound(t.nodes.begin(), t.nodes.end(), r);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - t.nodes.begin()), t.nodes.size() - 1);
    const double w = (r - t.nodes[i - 1]) / (t.nodes[i] - t.nodes[i - 1]);
    return (1.0 - w) * t.values[i - 1] + w * t.values[i];
  }

  // \int_{r1}^{r2} eta, exact for both representations.
  double integral() const {
    if (const auto* pw = std::get_if<Power>(&profile_)) {
      return pw->coefficient * detail::power_integral(pw->exponent, r1_, r2_);
    }
    const auto& t = std::get<Tabulated>(profile_);
    double s = 0.0;
    for (std::size_t i = 1; i < t.nodes.size(); ++i) {
      s += 0.5 * (t.values[i] + t.values[i - 1]) * (t.nodes[i] - t.nodes[i - 1]);
    }
    return s;
  }

  EtaFunction scaled(double c) const {
    if (!(c >= 1.0)) throw ConfigError("eta: scaling below 1 breaks the normalization");
    EtaFunction e = *this;
    if (auto* pw = std::get_if<Power>(&e.profile_)) {
      pw->coefficient *= c;
    } else {
      for (auto& v : std::get<Tabulated>(e.profile_).values) v *= c;
    }
    return e;
  }

 private:
  EtaFunction(double r1, double r2) : r1_(r1), r2_(r2) {
    if (!(r1 > 0.0) || !(r2 > r1) || !std::isfinite(r2)) throw ConfigError("eta: need 0 < r1 < r2");
  }

  void validate() const {
    if (integral() < 1.0 - 1e-9) throw ConfigError("eta: \\int eta must be >= 1");
  }

  double r1_;
  double r2_;
  std::variant<Power, Tabulated> profile_;
};

// eta(r) = r^{(1-n)/(p-1)} / \int_{r1}^{r2} t^{(1-n)/(p-1)} dt, the profile
// of the extremal density of the ring family.
inline EtaFunction extremal_eta(std::size_t n, double p, double r1, double r2) {
  detail::require_ring(n, p, r1, r2);
  const double a = (1.0 - static_cast<double>(n)) / (p - 1.0);
  return EtaFunction::power(r1, r2, a, 1.0 / detail::power_integral(a, r1, r2));
}

template <std::size_t N>
struct RhoField {
  DensityField<N> field;
  std::size_t branch_cells = 0;
};

inline constexpr double kBranchExclusion = 1e-9;

namespace detail {

// rho at one point; 0 outside the domain, off the preimage of the annulus,
// and on the branch-locus exclusion zone (reported through `near_branch`).
template <std::size_t N>
double rho_value(const SmoothMap<N>& f, const EtaFunction& eta, const Point<N>& y0, const Point<N>& x,
                 bool* near_branch = nullptr) {
  if (!f.domain().contains(x)) return 0.0;
  if (f.distance_to_branch_locus(x) <= kBranchExclusion) {
    if (near_branch != nullptr) *near_branch = true;
    return 0.0;
  }
  const Point<N> y = f.raw(x);
  const double r = distance(y, y0);
  if (!(r > eta.r1()) || !(r < eta.r2())) return 0.0;
  const double e = eta(r);
  if (e == 0.0) return 0.0;
  return e * cotangent_factor(f.jacobian(x), (y - y0) / r);
}

}  // namespace detail

// Cell-center samples of rho(x) for the map f and base point y0.
template <std::size_t N>
RhoField<N> rho_from_eta(const SmoothMap<N>& f, const EtaFunction& eta, const Point<N>& y0,
                         const UniformGrid<N>& grid) {
  RhoField<N> out{DensityField<N>(grid), 0};
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    bool branch = false;
    try {
      const double v = detail::rho_value(f, eta, y0, grid.center(c), &branch);
      if (v > 0.0) out.field.set(c, v);
    } catch (const Error& err) {
      throw NumericError("rho: cell " + std::to_string(c) + ": " + err.what());
    }
    if (branch) ++out.branch_cells;
  }
  return out;
}

// Same test as is_admissible on the cell-center samples of rho over `grid`,
// but rho is evaluated only on the cells the curves cross.
template <std::size_t N>
AdmissibilityReport rho_admissibility(const SmoothMap<N>& f, const EtaFunction& eta, const Point<N>& y0,
                                      const UniformGrid<N>& grid, const CurveFamily<N>& family, double slack) {
  AdmissibilityReport r;
  r.curves = family.size();
  if (family.empty()) return r;
  std::unordered_map<std::size_t, double> cache;
  r.min_integral = std::numeric_limits<double>::infinity();
  for (const auto& g : family.curves) {
    double v = 0.0;
    for (const auto& c : cell_lengths(grid, g)) {
      auto it = cache.find(c.cell);
      if (it == cache.end()) {
        double rho = 0.0;
        try {
          rho = detail::rho_value(f, eta, y0, grid.center(c.cell));
        } catch (const Error& err) {
          throw NumericError("rho: cell " + std::to_string(c.cell) + ": " + err.what());
        }
        it = cache.emplace(c.cell, rho).first;
      }
      v += c.length * it->second;
    }
    r.min_integral = std::min(r.min_integral, v);
    if (v >= 1.0 - slack) ++r.passed;
  }
  r.pass_fraction = static_cast<double>(r.passed) / static_cast<double>(r.curves);
  return r;
}

struct RouteResult {
  double value = 0.0;
  // Measure of nodes dropped because K_CT was infinite there.
  double skipped_measure = 0.0;
  // Measure of annulus nodes with an empty fiber (outside f(D)).
  double outside_measure = 0.0;
  std::size_t nodes = 0;
  std::size_t branch_cells = 0;
  std::size_t resolution = 0;
};

// \int_D rho^p dm(x), midpoint rule on the Cartesian grid.
template <std::size_t N>
RouteResult rhs_domain_route(const SmoothMap<N>& f, const EtaFunction& eta, const Point<N>& y0, double p,
                             const UniformGrid<N>& grid) {
  detail::require_order(p);
  const auto rho = rho_from_eta(f, eta, y0, grid);
  RouteResult r;
  r.value = rho.field.p_energy(p);
  r.nodes = grid.cell_count();
  r.branch_cells = rho.branch_cells;
  r.skipped_measure = static_cast<double>(rho.branch_cells) * grid.cell_volume();
  r.resolution = grid.count(0);
  return r;
}

// \int_{A cap f(D)} K_CT,p,y0(y) eta^p(|y - y0|) dm(y), midpoint rule on a
// polar (N = 2) or spherical product (N = 3) grid with `resolution` cells
// per coordinate.
template <std::size_t N>
RouteResult rhs_image_route(const SmoothMap<N>& f, const EtaFunction& eta, const Point<N>& y0, double p,
                            std::size_t resolution) {
  detail::require_order(p);
  if (resolution == 0) throw ConfigError("image route: resolution must be >= 1");
  const double r1 = eta.r1(), r2 = eta.r2();
  const double dr = (r2 - r1) / static_cast<double>(resolution);
  RouteResult out;
  out.resolution = resolution;
  auto accumulate = [&](const Point<N>& y, double r, double w) {
    ++out.nodes;
    DilatationSample<N> k;
    try {
      k = k_ct_point(f, y, y0, p);
    } catch (const UndefinedValue&) {
      out.outside_measure += w;
      return;
    }
    if (!std::isfinite(k.value)) {
      out.skipped_measure += w;
      return;
    }
    out.value += k.value * std::pow(eta(r), p) * w;
  };
  if constexpr (N == 2) {
    const double dt = 2.0 * std::numbers::pi / static_cast<double>(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      const double r = r1 + (i + 0.5) * dr;
      for (std::size_t j = 0; j < resolution; ++j) {
        const double t = (j + 0.5) * dt;
        accumulate(y0 + Point<2>{r * std::cos(t), r * std::sin(t)}, r, r * dr * dt);
      }
    }
  } else if constexpr (N == 3) {
    const double dth = std::numbers::pi / static_cast<double>(resolution);
    const double dph = 2.0 * std::numbers::pi / static_cast<double>(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      const double r = r1 + (i + 0.5) * dr;
      for (std::size_t j = 0; j < resolution; ++j) {
        const double th = (j + 0.5) * dth;
        for (std::size_t k = 0; k < resolution; ++k) {
          const double ph = (k + 0.5) * dph;
          const Point<3> d{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
          accumulate(y0 + r * d, r, r * r * std::sin(th) * dr * dth * dph);
        }
      }
    }
  } else {
    throw ConfigError("image route: only dimensions 2 and 3 are supported");
  }
  return out;
}

enum class ModulusKind { analytic, discrete_lower, admissible_upper };

inline const char* to_string(ModulusKind k) {
  switch (k) {
    case ModulusKind::analytic: return "analytic";
    case ModulusKind::discrete_lower: return "discrete-lower";
    case ModulusKind::admissible_upper: return "admissible-upper";
  }
  return "?";
}

struct SolverOptions {
  double gap_tolerance = 1e-3;
  std::size_t max_iterations = 100000;  // sweeps over the constraint set
};

template <std::size_t N>
struct ModulusEstimate {
  // Dual objective: a certified lower bound for the discrete problem.
  double value = 0.0;
  // Energy of the rescaled (feasible) primal density: an upper bound.
  double primal_value = 0.0;
  ModulusKind kind = ModulusKind::discrete_lower;
  std::size_t iterations = 0;
  double gap = 0.0;
  bool certified = false;
  std::size_t cells = 0;
  std::size_t constraints = 0;
  std::size_t active_constraints = 0;
  std::optional<DensityField<N>> density;
};

namespace detail {

// Sparse constraint rows over a compressed set of touched cells.
struct ConstraintSystem {
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t cells = 0;
  std::vector<std::size_t> cell_ids;  // compressed -> grid cell
};

template <std::size_t N>
ConstraintSystem build_constraints(const CurveFamily<N>& fam, const UniformGrid<N>& grid) {
  ConstraintSystem sys;
  std::vector<std::size_t> remap(grid.cell_count(), std::numeric_limits<std::size_t>::max());
  sys.rows.reserve(fam.size());
  for (const auto& g : fam.curves) {
    std::vector<std::pair<std::size_t, double>> row;
    for (const auto& c : cell_lengths(grid, g)) {
      if (!(c.length > 0.0)) continue;
      if (remap[c.cell] == std::numeric_limits<std::size_t>::max()) {
        remap[c.cell] = sys.cell_ids.size();
        sys.cell_ids.push_back(c.cell);
      }
      row.emplace_back(remap[c.cell], c.length);
    }
    sys.rows.push_back(std::move(row));
  }
  sys.cells = sys.cell_ids.size();
  return sys;
}

}  // namespace detail

// Discrete p-modulus of a finite family on a grid:
//
//   min sum_c vol * rho_c^p  s.t.  sum_c len(gamma, c) rho_c >= 1 for all gamma, rho >= 0.
//
// Solved through its concave dual
//
//   D(lambda) = sum lambda_g - (p-1) sum_c vol rho_c(lambda)^p,
//   rho_c(lambda) = (g_c / (p vol))^{1/(p-1)},  g = L^T lambda,
//
// by exact coordinate ascent (one constraint at a time, most violated
// constraints activate as their multiplier leaves zero). Each sweep is
// certified by rescaling rho(lambda) to feasibility, which bounds the
// optimum from above.
template <std::size_t N>
ModulusEstimate<N> discrete_modulus(const CurveFamily<N>& fam, const UniformGrid<N>& grid, double p,
                                    const SolverOptions& opt = {}) {
  detail::require_order(p);
  if (fam.empty()) throw InvalidInput("discrete modulus: empty curve family");
  const auto sys = detail::build_constraints(fam, grid);
  for (const auto& row : sys.rows) {
    if (row.empty()) throw InvalidInput("discrete modulus: curve of zero length");
  }
  const double vol = grid.cell_volume();
  const double inv_pm1 = 1.0 / (p - 1.0);
  const double pv = p * vol;
  const bool quadratic = std::abs(p - 2.0) < 1e-15;
  auto rho_of = [&](double g) { return g > 0.0 ? (quadratic ? g / pv : std::pow(g / pv, inv_pm1)) : 0.0; };

  const std::size_t m = sys.rows.size();
  std::vector<double> lambda(m, 0.0), g(sys.cells, 0.0), rho(sys.cells, 0.0);

  auto recompute = [&]() {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      if (lambda[k] == 0.0) continue;
      for (const auto& [c, l] : sys.rows[k]) g[c] += lambda[k] * l;
    }
    for (std::size_t c = 0; c < sys.cells; ++c) rho[c] = rho_of(g[c]);
  };

  // Solves sum_i l_i rho(base_i + t l_i) = 1 for t >= 0 (monotone in t).
  auto solve_coordinate = [&](const std::vector<std::pair<std::size_t, double>>& row,
                              std::vector<double>& base) -> double {
    auto phi = [&](double t, double* dphi) {
      double s = 0.0, ds = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        const double l = row[i].second;
        const double gi = base[i] + t * l;
        const double r = rho_of(gi);
        s += l * r;
        if (dphi != nullptr && gi > 0.0) ds += l * l * r * inv_pm1 / gi;
      }
      if (dphi != nullptr) *dphi = ds;
      return s;
    };
    if (phi(0.0, nullptr) >= 1.0) return 0.0;
    if (quadratic) {
      double s0 = 0.0, q = 0.0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        s0 += row[i].second * base[i] / pv;
        q += row[i].second * row[i].second / pv;
      }
      return std::max(0.0, (1.0 - s0) / q);
    }
    double lo = 0.0, hi = 1.0;
    while (phi(hi, nullptr) < 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw NumericError("discrete modulus: coordinate step diverged");
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double d = 0.0;
      const double v = phi(t, &d) - 1.0;
      if (std::abs(v) <= 1e-14) break;
      if (v < 0.0) lo = t; else hi = t;
      double next = d > 0.0 ? t - v / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
      t = next;
    }
    return t;
  };

  ModulusEstimate<N> est;
  est.cells = sys.cells;
  est.constraints = m;
  std::vector<double> base;
  std::vector<double> best_rho;
  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;
  for (std::size_t sweep = 1; sweep <= opt.max_iterations; ++sweep) {
    for (std::size_t k = 0; k < m; ++k) {
      const auto& row = sys.rows[k];
      base.resize(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) {
        base[i] = std::max(0.0, g[row[i].first] - lambda[k] * row[i].second);
      }
      const double t = solve_coordinate(row, base);
      if (t == lambda[k]) continue;
      lambda[k] = t;
      for (std::size_t i = 0; i < row.size(); ++i) {
        const std::size_t c = row[i].first;
        g[c] = base[i] + t * row[i].second;
        rho[c] = rho_of(g[c]);
      }
    }
    if (sweep % 64 == 0) recompute();

    // Certificate.
    double energy = 0.0;
    for (double r : rho)
      if (r > 0.0) energy += std::pow(r, p);
    energy *= vol;
    double sum_lambda = 0.0;
    std::size_t active = 0;
    for (double l : lambda) {
      sum_lambda += l;
      if (l > 0.0) ++active;
    }
    double min_len = std::numeric_limits<double>::infinity();
    for (const auto& row : sys.rows) {
      double s = 0.0;
      for (const auto& [c, l] : row) s += l * rho[c];
      min_len = std::min(min_len, s);
    }
    const double lower = sum_lambda - (p - 1.0) * energy;
    const double upper = min_len > 0.0 ? energy / std::pow(min_len, p) : std::numeric_limits<double>::infinity();
    best_lower = std::max(best_lower, lower);
    if (upper < best_upper) {
      best_upper = upper;
      best_rho = rho;
      for (auto& r : best_rho) r /= min_len;
    }
    est.iterations = sweep;
    est.active_constraints = active;
    est.gap = std::isfinite(best_upper) ? (best_upper - best_lower) / best_upper : 1.0;
    if (est.gap <= opt.gap_tolerance) {
      est.certified = true;
      break;
    }
  }
  est.value = best_lower;
  est.primal_value = best_upper;
  DensityField<N> field(grid);
  if (!best_rho.empty()) {
    for (std::size_t c = 0; c < sys.cells; ++c) field.set(sys.cell_ids[c], best_rho[c]);
  }
  est.density = std::move(field);
  return est;
}

// Upper estimate of a ring modulus from one admissible density: the
// extremal radial density sampled on the grid, rescaled so that every curve
// of `fam` has \int rho >= 1.
template <std::size_t N>
ModulusEstimate<N> admissible_upper(const CurveFamily<N>& fam, const UniformGrid<N>& grid, const EtaFunction& eta,
                                    const Point<N>& y0, double p) {
  DensityField<N> rho(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const double r = distance(grid.center(c), y0);
    rho.set(c, eta(r));
  }
  double min_len = std::numeric_limits<double>::infinity();
  for (const auto& g : fam.curves) min_len = std::min(min_len, line_integral(rho, g));
  if (!(min_len > 0.0)) throw NumericError("admissible upper: density vanishes along a curve");
  ModulusEstimate<N> est;
  est.kind = ModulusKind::admissible_upper;
  est.value = rho.p_energy(p) / std::pow(min_len, p);
  est.primal_value = est.value;
  est.cells = grid.cell_count();
  est.constraints = fam.size();
  est.certified = true;
  est.density = rho.scaled(1.0 / min_len);
  return est;
}

struct InequalityOptions {
  std::size_t domain_grid = 256;        // Cartesian grid for the domain route and the solver
  std::size_t image_grid = 256;         // polar grid for the image route
  std::size_t admissibility_grid = 1024;
  std::size_t radial_curves = 512;
  std::size_t grid_paths = 64;
  std::size_t grid_path_resolution = 64;
  std::uint64_t seed = 1;
  double tolerance = 0.02;
  double admissibility_slack = 0.01;
  double admissibility_fraction = 0.99;
  SolverOptions solver;
  // Test function for the right-hand side; the extremal profile when unset.
  std::optional<EtaFunction> eta;
  // Double both quadrature grids until successive values differ by < 0.5%
  // (capped at 1024 cells per axis).
  bool refine = false;
};

// Evaluates route(res) at res, 2 res, ... until two successive values differ
// by less than `rel` or `cap` is reached. Returns the last result.
template <typename Route>
RouteResult refine_route(Route&& route, std::size_t start, std::size_t cap = 1024, double rel = 5e-3) {
  RouteResult prev = route(start);
  for (std::size_t res = 2 * start; res <= cap; res *= 2) {
    RouteResult next = route(res);
    const bool done = std::abs(next.value - prev.value) <= rel * std::abs(next.value);
    prev = next;
    if (done) break;
  }
  return prev;
}

template <std::size_t N>
struct InequalityReport {
  double lhs_lower = 0.0;
  double lhs_upper = 0.0;
  std::optional<double> lhs_analytic;
  RouteResult rhs_domain;
  RouteResult rhs_image;
  double rhs = 0.0;  // min of the two routes
  double route_gap = 0.0;
  AdmissibilityReport admissibility;
  std::size_t image_curves = 0;
  std::size_t lifted_curves = 0;
  std::size_t dropped_breaks = 0;
  std::size_t dropped_branch = 0;
  std::size_t solver_iterations = 0;
  double solver_gap = 0.0;
  bool solver_certified = false;

  bool inequality_holds = false;
  std::optional<bool> analytic_matches;
  bool routes_consistent = false;
  bool admissible = false;
  double tolerance = 0.0;
};

// Desk check of the inverse Poletsky inequality at y0. The left side is the
// discrete modulus of the lifts of radial and grid-path image curves (a
// subfamily of Gamma_f, hence a lower estimate); the right side uses the
// extremal eta unless one is supplied, in which case the analytic equality
// check is skipped.
template <std::size_t N>
InequalityReport<N> verify_inequality(const SmoothMap<N>& f, const Point<N>& y0, double r1, double r2, double p,
                                      const InequalityOptions& opt = {}) {
  detail::require_ring(N, p, r1, r2);
  InequalityReport<N> rep;
  rep.tolerance = opt.tolerance;

  auto image = radial_family<N>(y0, r1, r2, opt.radial_curves);
  const std::size_t radial_count = image.size();
  if (opt.grid_paths > 0) {
    image.append(annulus_grid_paths<N>(y0, r1, r2, opt.grid_path_resolution, opt.grid_paths, opt.seed));
  }
  rep.image_curves = image.size();

  const auto [lo, hi] = f.domain().bounding_box();
  const UniformGrid<N> grid(lo, hi, opt.domain_grid);
  PullbackOptions po;
  po.continuity_tolerance = 0.1 * grid.min_cell_size();
  const auto lifted = pullback_family(f, image, po);
  rep.lifted_curves = lifted.size();
  rep.dropped_breaks = lifted.dropped_breaks;
  rep.dropped_branch = lifted.dropped_branch;
  if (lifted.empty()) throw NumericError("verify: no curve could be lifted through f");

  const auto lhs = discrete_modulus(lifted, grid, p, opt.solver);
  rep.lhs_lower = lhs.value;
  rep.lhs_upper = lhs.primal_value;
  rep.solver_iterations = lhs.iterations;
  rep.solver_gap = lhs.gap;
  rep.solver_certified = lhs.certified;

  if (const auto ring = f.ring_preimage(y0, r1, r2)) {
    rep.lhs_analytic = ring_modulus_analytic(N, p, ring->inner, ring->outer);
  }

  const bool extremal = !opt.eta.has_value();
  const EtaFunction eta = extremal ? extremal_eta(N, p, r1, r2) : *opt.eta;
  if (!extremal && (std::abs(eta.r1() - r1) > 1e-12 * r2 || std::abs(eta.r2() - r2) > 1e-12 * r2)) {
    throw ConfigError("verify: eta must be defined on (r1, r2)");
  }
  auto domain_route = [&](std::size_t res) { return rhs_domain_route(f, eta, y0, p, UniformGrid<N>(lo, hi, res)); };
  auto image_route = [&](std::size_t res) { return rhs_image_route(f, eta, y0, p, res); };
  if (opt.refine) {
    rep.rhs_domain = refine_route(domain_route, opt.domain_grid);
    rep.rhs_image = refine_route(image_route, opt.image_grid);
  } else {
    rep.rhs_domain = domain_route(opt.domain_grid);
    rep.rhs_image = image_route(opt.image_grid);
  }
  rep.rhs = std::min(rep.rhs_domain.value, rep.rhs_image.value);
  rep.route_gap = std::abs(rep.rhs_domain.value - rep.rhs_image.value) / rep.rhs_image.value;

  // Admissibility of rho on the lifts of the radial image curves.
  CurveFamily<N> radial_lifts;
  {
    CurveFamily<N> radial_image;
    radial_image.curves.assign(image.curves.begin(), image.curves.begin() + static_cast<std::ptrdiff_t>(radial_count));
    radial_lifts = pullback_family(f, radial_image, po);
  }
  const UniformGrid<N> fine(lo, hi, opt.admissibility_grid);
  rep.admissibility = rho_admissibility(f, eta, y0, fine, radial_lifts, opt.admissibility_slack);

  rep.inequality_holds = rep.lhs_lower <= rep.rhs * (1.0 + opt.tolerance);
  if (rep.lhs_analytic && extremal) {
    rep.analytic_matches = std::abs(*rep.lhs_analytic - rep.rhs_domain.value) <= opt.tolerance * *rep.lhs_analytic &&
                           std::abs(*rep.lhs_analytic - rep.rhs_image.value) <= opt.tolerance * *rep.lhs_analytic;
  }
  rep.routes_consistent = rep.route_gap <= opt.tolerance;
  rep.admissible = rep.admissibility.pass_fraction >= opt.admissibility_fraction;
  return rep;
}

}  // namespace qcmod

#endif  // QCMOD_MODULUS_HPP
