// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qcmod/cli/commands.hpp"
#include "support.hpp"

using namespace qcmod;
using qcmod::testing::random_in_annulus;
using qcmod::testing::spec;
using std::numbers::pi;

namespace {

struct Gate {
  int failures = 0;

  void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <std::size_t N>
MapSpec random_linear(std::mt19937_64& rng, double radius) {
  return qcmod::testing::linear_spec<N>(qcmod::testing::random_nondegenerate<N>(rng), radius);
}

void criterion_ring_constant(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = gallery<2>(spec("radial", 3.0, 3.0));
  const auto fd = f.finite_difference_copy();
  std::mt19937_64 rng(2022);
  double err_analytic = 0.0, err_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = random_in_annulus<2>(rng, Point<2>{}, 0.5, 2.0);
    err_analytic = std::max(err_analytic, std::abs(d_f_point(f, x, Point<2>{}) - 1.0 / 3.0));
    err_fd = std::max(err_fd, std::abs(d_f_point(fd, x, Point<2>{}) - 1.0 / 3.0));
  }
  double err_mu = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = random_in_annulus<2>(rng, Point<2>{}, 0.5, 2.0);
    const std::complex<double> z(x[0], x[1]);
    err_mu = std::max(err_mu, std::abs(d_f_from_mu(0.5 * z / std::conj(z), x, Point<2>{}) - 1.0 / 3.0));
  }
  const double secs = seconds_since(t0);
  gate.report(1, "D_f(x,0) = 1/3 for |z|^2 z", err_analytic <= 1e-9 && err_fd <= 1e-5 && err_mu <= 1e-12 && secs < 1.0,
              fmt("max err analytic %.2e (<= 1e-9), finite differences %.2e (<= 1e-5), from mu %.2e (<= 1e-12), "
                  "%.3f s (< 1 s)",
                  err_analytic, err_fd, err_mu, secs));
}

void criterion_identity(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(17);
  struct Case {
    MapSpec spec;
    int samples;
  };
  std::vector<Case> cases{{spec("identity", 3.0), 100}, {spec("radial", 3.0, 1.0 / 3.0), 200},
                          {spec("radial", 3.0, 3.0), 200}};
  for (int i = 0; i < 50; ++i) cases.push_back({random_linear<2>(rng, 3.0), 10});

  double worst = 0.0, worst_independent = 0.0;
  int used = 0;
  for (const auto& c : cases) {
    const auto f = gallery<2>(c.spec);
    const auto g = gallery<2>(*gallery_inverse<2>(c.spec));
    for (int i = 0; i < c.samples; ++i) {
      const auto x = random_in_annulus<2>(rng, Point<2>{}, 0.05, 2.95);
      const auto x0 = random_in_annulus<2>(rng, Point<2>{}, 0.0, 1.0);
      if (distance(x, x0) < 1e-6) continue;
      const auto r = identity_residual(f, x, x0);
      worst = std::max(worst, r.residual);
      // K_CT of f^-1 through its own fiber and analytic derivative.
      const double k = k_ct_point(g, x, x0, 2.0).value;
      worst_independent = std::max(worst_independent, std::abs(k - r.d_f));
      ++used;
    }
  }
  const double secs = seconds_since(t0);
  gate.report(2, "K_CT,2,x0(f(x), f^-1) = D_f(x, x0)",
              used >= 1000 && worst <= 1e-8 && worst_independent <= 1e-8 && secs < 5.0,
              fmt("%d samples over identity, radial 1/3 and 3, 50 linear maps; max residual %.2e, via inverse map "
                  "%.2e (<= 1e-8), %.3f s (< 5 s)",
                  used, worst, worst_independent, secs));
}

void criterion_cauchy_schwarz(Gate& gate) {
  std::mt19937_64 rng(31);
  std::vector<SmoothMap<2>> maps{gallery<2>(spec("identity", 4.0)), gallery<2>(spec("radial", 4.0, 3.0)),
                                 gallery<2>(spec("radial", 30.0, 1.0 / 3.0)), gallery<2>(spec("winding", 2.0, 1.0, 2)),
                                 gallery<2>(spec("winding", 1.6, 1.0, 3))};
  for (int i = 0; i < 5; ++i) maps.push_back(gallery<2>(random_linear<2>(rng, 80.0)));
  int tuples = 0, violations = 0;
  double worst = 0.0;
  while (tuples < 10000) {
    const auto& f = maps[static_cast<std::size_t>(tuples) % maps.size()];
    const auto y = random_in_annulus<2>(rng, Point<2>{}, 0.05, 3.0);
    const auto y0 = random_in_annulus<2>(rng, Point<2>{}, 0.0, 3.0);
    if (distance(y, y0) < 1e-6) continue;
    const double p = qcmod::testing::uniform(rng, 1.05, 6.0);
    const double kct = k_ct_point(f, y, y0, p).value;
    const double ki = k_i_point(f, y, p);
    worst = std::max(worst, kct / ki);
    if (kct > ki * (1.0 + 1e-12)) ++violations;
    ++tuples;
  }
  // Strictness: the radial stretch with exponent 1/3 (the inverse of |z|^2 z)
  // at p = 2, y0 = 0 has K_CT = 1/3 and K_I = 3.
  const auto g = gallery<2>(spec("radial", 4.0, 1.0 / 3.0));
  const Point<2> y{1.3, -0.4};
  const double kct = k_ct_point(g, y, Point<2>{}, 2.0).value;
  const double ki = k_i_point(g, y, 2.0);
  const bool strict = std::abs(kct - 1.0 / 3.0) < 1e-12 && ki > 1.0 && kct < ki;
  gate.report(3, "K_CT <= K_I", violations == 0 && strict,
              fmt("%d tuples, %d violations beyond 1e-12 (max K_CT/K_I %.6f); strict for radial 1/3, p=2: "
                  "K_CT = %.12f < K_I = %.12f",
                  tuples, violations, worst, kct, ki));
}

void criterion_ki_lower_bound(Gate& gate) {
  std::mt19937_64 rng(41);
  std::vector<SmoothMap<2>> maps{gallery<2>(spec("identity", 4.0)), gallery<2>(spec("radial", 4.0, 3.0)),
                                 gallery<2>(spec("radial", 30.0, 1.0 / 3.0)), gallery<2>(spec("winding", 2.0, 1.0, 2)),
                                 gallery<2>(spec("winding", 1.6, 1.0, 3))};
  for (int i = 0; i < 10; ++i) maps.push_back(gallery<2>(random_linear<2>(rng, 80.0)));
  double min_ki = 1e300;
  int samples = 0;
  for (const auto& f : maps) {
    for (int i = 0; i < 1000; ++i) {
      const auto y = random_in_annulus<2>(rng, Point<2>{}, 0.05, 3.0);
      min_ki = std::min(min_ki, k_i_point(f, y, 2.0));
      ++samples;
    }
  }
  gate.report(4, "K_I >= 1 at p = n = 2", min_ki >= 1.0 - 1e-12,
              fmt("%d samples over %zu gallery maps, min K_I = %.15f", samples, maps.size(), min_ki));
}

struct RingScenario {
  const char* label;
  MapSpec spec;
  double r1, r2;
};

std::vector<RingScenario> theorem_scenarios() {
  return {{"identity ring(1,e)", spec("identity", std::exp(1.0)), 1.0, std::exp(1.0)},
          {"radial 3, ring(1,8)", spec("radial", 2.0, 3.0), 1.0, 8.0},
          {"winding 2, ring(1,16)", spec("winding", 4.0, 1.0, 2), 1.0, 16.0}};
}

void criteria_theorem(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  const double expected[] = {2.0 * pi, 2.0 * pi / std::log(2.0), 4.0 * pi / std::log(16.0)};
  bool ok5 = true, ok6 = true;
  std::string d5, d6;
  int idx = 0;
  for (const auto& sc : theorem_scenarios()) {
    const auto f = gallery<2>(sc.spec);
    const auto rep = verify_inequality(f, Point<2>{}, sc.r1, sc.r2, 2.0);
    const double dom = rep.rhs_domain.value, img = rep.rhs_image.value;
    const bool lhs_ok = rep.lhs_lower <= dom * 1.02 && rep.lhs_lower <= img * 1.02;
    const double a = rep.lhs_analytic.value_or(-1.0);
    const bool analytic_ok = std::abs(a - expected[idx]) <= 1e-12 * expected[idx] &&
                             std::abs(a - dom) <= 0.02 * a && std::abs(a - img) <= 0.02 * a;
    ok5 = ok5 && lhs_ok && analytic_ok && rep.solver_certified;
    d5 += fmt("%s%s: LHS %.4f <= RHS dom %.4f / img %.4f; analytic %.4f", idx ? "; " : "", sc.label,
              rep.lhs_lower, dom, img, a);
    ok6 = ok6 && rep.admissibility.pass_fraction >= 0.99;
    d6 += fmt("%s%s: %.1f%% of %zu lifts (min %.4f)", idx ? "; " : "", sc.label,
              100.0 * rep.admissibility.pass_fraction, rep.admissibility.curves, rep.admissibility.min_integral);
    ++idx;
  }
  const double secs = seconds_since(t0);
  ok5 = ok5 && secs < 120.0;
  gate.report(5, "inverse Poletsky inequality at 256^2", ok5, d5 + fmt("; %.1f s (< 120 s)", secs));
  gate.report(6, "admissibility of rho, integral >= 0.99", ok6, d6);
}

void criterion_routes(Gate& gate) {
  std::mt19937_64 rng(53);
  const auto lin = random_linear<2>(rng, 1.0);
  Matrix<2> a;
  std::copy(lin.matrix.begin(), lin.matrix.end(), a.a.begin());
  auto lin_spec = lin;
  lin_spec.domain_radius = 2.0 / min_singular(a);

  std::vector<RingScenario> cases = theorem_scenarios();
  cases.push_back({"radial 1/3, ring(1,2)", spec("radial", 8.0, 1.0 / 3.0), 1.0, 2.0});
  cases.push_back({"radial 2, ring(0.5,3)", spec("radial", std::sqrt(3.0), 2.0), 0.5, 3.0});
  cases.push_back({"winding 3, ring(1,8)", spec("winding", 2.0, 1.0, 3), 1.0, 8.0});
  cases.push_back({"linear, ring(1,2)", lin_spec, 1.0, 2.0});

  bool ok = true;
  std::string detail;
  double worst = 0.0;
  for (const auto& sc : cases) {
    const auto f = gallery<2>(sc.spec);
    const auto eta = extremal_eta(2, 2.0, sc.r1, sc.r2);
    const auto [lo, hi] = f.domain().bounding_box();
    const auto dom = rhs_domain_route(f, eta, Point<2>{}, 2.0, UniformGrid<2>(lo, hi, 256));
    const auto img = rhs_image_route(f, eta, Point<2>{}, 2.0, 256);
    const double gap = std::abs(dom.value - img.value) / img.value;
    worst = std::max(worst, gap);
    ok = ok && gap <= 0.02;
    detail += fmt("%s%s %.2f%%", detail.empty() ? "" : ", ", sc.label, 100.0 * gap);
  }
  gate.report(7, "domain route = image route at 256^2", ok, fmt("max gap %.3f%% (<= 2%%): ", 100.0 * worst) + detail);
}

CurveFamily<2> ring_family(double r2, std::size_t radial, std::size_t paths) {
  auto fam = radial_family<2>(Point<2>{}, 1.0, r2, radial);
  fam.append(annulus_grid_paths<2>(Point<2>{}, 1.0, r2, 64, paths, 1));
  return fam;
}

void criterion_solver(Gate& gate) {
  const double e = std::exp(1.0);
  const double target = 2.0 * pi;
  auto grid_at = [&](std::size_t res) { return UniformGrid<2>(Point<2>{-e, -e}, Point<2>{e, e}, res); };

  const auto fam128 = ring_family(e, 1024, 64);
  const auto est128 = discrete_modulus(fam128, grid_at(128), 2.0);
  const double err128 = std::abs(est128.value - target) / target;
  const bool ring_ok = est128.certified && err128 <= 0.05;

  // One oblique segment: the optimum is (sum vol^{1-q} l_c^q)^{1-p}, q = p/(p-1).
  double single_err = 0.0;
  const UniformGrid<2> g1(Point<2>{-1.0, -1.0}, Point<2>{1.0, 1.0}, 32);
  CurveFamily<2> one;
  one.curves.emplace_back(std::vector<Point<2>>{Point<2>{-0.83, -0.2}, Point<2>{0.71, 0.64}});
  for (double p : {1.5, 2.0, 3.0}) {
    const double q = p / (p - 1.0);
    double s = 0.0;
    for (const auto& c : cell_lengths(g1, one.curves[0])) s += std::pow(g1.cell_volume(), 1.0 - q) * std::pow(c.length, q);
    const double exact = std::pow(s, 1.0 - p);
    single_err = std::max(single_err, std::abs(discrete_modulus(one, g1, p).value - exact) / exact);
  }

  double errs[3];
  const std::size_t res[3] = {64, 128, 256};
  for (int i = 0; i < 3; ++i) {
    const auto fam = ring_family(e, 8 * res[i], 64);
    errs[i] = std::abs(discrete_modulus(fam, grid_at(res[i]), 2.0).value - target) / target;
  }
  const bool monotone = errs[0] > errs[1] && errs[1] > errs[2];
  gate.report(8, "discrete modulus solver", ring_ok && single_err <= 1e-3 && monotone,
              fmt("ring(1,e) at 128^2 with %zu curves: %.4f vs 2pi (%.2f%%, <= 5%%); single curve max rel err %.2e "
                  "(<= 1e-3); errors 64/128/256: %.2f%% > %.2f%% > %.2f%%",
                  fam128.size(), est128.value, 100.0 * err128, single_err, 100.0 * errs[0], 100.0 * errs[1],
                  100.0 * errs[2]));
}

void criterion_scaling(Gate& gate) {
  bool ok = true;
  std::string detail;
  const UniformGrid<2> grid(Point<2>{-3.0, -3.0}, Point<2>{3.0, 3.0}, 128);
  auto fam = radial_family<2>(Point<2>{}, 1.0, 2.5, 512);
  fam.append(annulus_grid_paths<2>(Point<2>{}, 1.0, 2.5, 64, 32, 7));
  CurveFamily<2> scaled;
  for (const auto& g : fam.curves) scaled.curves.push_back(g.scaled(2.0));
  SolverOptions tight;
  tight.gap_tolerance = 1e-4;
  for (double p : {2.0, 3.0}) {
    const double a = discrete_modulus(fam, grid, p, tight).value;
    const double b = discrete_modulus(scaled, grid.scaled(2.0), p, tight).value;
    const double want = std::pow(2.0, 2.0 - p);
    const double rel = std::abs(b / a - want) / want;
    ok = ok && rel <= 0.01;
    detail += fmt("%s(n,p)=(2,%g): ratio %.6f vs %.6f (%.2e)", detail.empty() ? "" : "; ", p, b / a, want, rel);
  }
  gate.report(9, "scaling by c = 2 gives 2^{n-p}", ok, detail);
}

void criterion_determinism(Gate& gate) {
  using namespace qcmod::cli;
  auto scenario = [](const char* text) { return parse_scenario(json::parse(text)); };
  const Scenario runs[] = {
      scenario(R"({"map": {"name": "identity"}, "r2": 2.718281828459045, "grid": 64, "admissibility_grid": 256,
                   "grid_path_resolution": 32, "grid_paths": 16, "seed": 5})"),
      scenario(R"({"map": {"name": "winding", "k": 2}, "r2": 16, "grid": 64, "admissibility_grid": 256,
                   "grid_path_resolution": 32, "grid_paths": 16, "seed": 5})")};
  const char* commands[] = {"verify-theorem", "identity-check", "modulus", "dilatation-field"};
  bool ok = true;
  int compared = 0;
  for (const auto& s : runs) {
    for (const char* cmd : commands) {
      const auto a = run(cmd, s);
      const auto b = run(cmd, s);
      ok = ok && stable_dump(a.report) == stable_dump(b.report) && a.csv == b.csv && a.exit_code == b.exit_code;
      ++compared;
    }
  }
  gate.report(10, "byte-identical reports for equal seeds", ok, fmt("%d command/scenario pairs run twice", compared));
}

}  // namespace

int main() {
  Gate gate;
  const std::function<void(Gate&)> criteria[] = {criterion_ring_constant, criterion_identity, criterion_cauchy_schwarz,
                                                  criterion_ki_lower_bound, criteria_theorem,     criterion_routes,
                                                  criterion_solver,         criterion_scaling,    criterion_determinism};
  for (const auto& c : criteria) {
    try {
      c(gate);
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion aborted: %s\n", e.what());
      ++gate.failures;
    }
  }
  std::printf("%s: %d failing criteria\n", gate.failures == 0 ? "ACCEPTED" : "REJECTED", gate.failures);
  return gate.failures == 0 ? 0 : 1;
}
