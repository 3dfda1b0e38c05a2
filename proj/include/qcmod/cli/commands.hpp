#ifndef QCMOD_CLI_COMMANDS_HPP
#define QCMOD_CLI_COMMANDS_HPP

// The four scenario-driven commands behind the qcmod executable. Each one
// returns a JSON report (and, for dilatation-field, a CSV table) together
// with the process exit code:
//
//   0 every check passed, 1 some check failed, 2 invalid configuration,
//   3 numerical failure (the report is partial and names the cause).

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qcmod/cli/scenario.hpp"
#include "qcmod/qcmod.hpp"

namespace qcmod::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kConfigInvalid = 2, kNumericFailure = 3 };

struct CommandResult {
  json report;
  int exit_code = kPass;
  std::string csv;  // dilatation-field only
};

// Shortest round-trip text: decimal below 1e6 in magnitude, scientific at
// or above.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[512];
  const auto fmt = std::abs(v) >= 1e6 ? std::chars_format::scientific : std::chars_format::fixed;
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, fmt);
  return std::string(buf, end);
}

class ReportBuilder {
 public:
  ReportBuilder(std::string command, const Scenario& s) : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["scenario"] = to_json(s);
    doc_["checks"] = json::array();
    doc_["diagnostics"] = json::object();
  }

  void check(const std::string& name, json value, json reference, double tolerance, bool pass) {
    doc_["checks"].push_back(json{{"name", name},
                                  {"value", std::move(value)},
                                  {"reference", std::move(reference)},
                                  {"tolerance", tolerance},
                                  {"status", pass ? "pass" : "fail"}});
    all_pass_ = all_pass_ && pass;
  }

  // A check whose verdict cannot be given (e.g. uncertified solver output).
  void deferred(const std::string& name, json value, json reference, double tolerance) {
    doc_["checks"].push_back(json{{"name", name},
                                  {"value", std::move(value)},
                                  {"reference", std::move(reference)},
                                  {"tolerance", tolerance},
                                  {"status", "deferred"}});
    all_pass_ = false;
  }

  json& diagnostics() { return doc_["diagnostics"]; }

  CommandResult finish() {
    CommandResult r;
    doc_["pass"] = all_pass_;
    r.exit_code = all_pass_ ? kPass : kCheckFailed;
    doc_["exit_code"] = r.exit_code;
    stamp();
    r.report = doc_;
    return r;
  }

  CommandResult fail(int code, const std::string& cause) {
    CommandResult r;
    doc_["pass"] = false;
    doc_["failure"] = cause;
    doc_["exit_code"] = code;
    r.exit_code = code;
    stamp();
    r.report = doc_;
    return r;
  }

 private:
  void stamp() {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc_["timings"] = json{{"total_seconds", secs}};
  }

  json doc_;
  bool all_pass_ = true;
  std::chrono::steady_clock::time_point start_;
};

namespace detail {

template <std::size_t N>
Point<N> to_point(const std::vector<double>& v) {
  Point<N> p;
  for (std::size_t i = 0; i < N; ++i) p[i] = v[i];
  return p;
}

template <std::size_t N>
json to_json_point(const Point<N>& p) {
  return json(std::vector<double>(p.c.begin(), p.c.end()));
}

inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <std::size_t N>
Point<N> sample_ball(std::mt19937_64& rng, const Point<N>& c, double radius) {
  for (;;) {
    Point<N> x;
    for (std::size_t i = 0; i < N; ++i) x[i] = 2.0 * unit_draw(rng) - 1.0;
    if (norm(x) < 1.0) return c + radius * x;
  }
}

inline EtaFunction scenario_eta(const Scenario& s) {
  if (s.eta_nodes) return EtaFunction::tabulated(*s.eta_nodes, *s.eta_values);
  return extremal_eta(s.dimension, s.p, s.r1, s.r2);
}

template <std::size_t N>
json route_json(const RouteResult& r) {
  return json{{"value", r.value},
              {"resolution", r.resolution},
              {"nodes", r.nodes},
              {"skipped_measure", r.skipped_measure},
              {"outside_measure", r.outside_measure},
              {"branch_cells", r.branch_cells}};
}

template <std::size_t N>
CommandResult verify_theorem(const Scenario& s) {
  ReportBuilder rb("verify-theorem", s);
  try {
    const auto f = gallery<N>(s.map);
    const Point<N> y0 = to_point<N>(s.y0);
    InequalityOptions opt;
    opt.domain_grid = s.grid;
    opt.image_grid = s.image_grid;
    opt.admissibility_grid = s.admissibility_grid;
    opt.radial_curves = s.radial_curves;
    opt.grid_paths = s.grid_paths;
    opt.grid_path_resolution = s.grid_path_resolution;
    opt.seed = s.seed;
    opt.tolerance = s.tolerances.inequality;
    opt.refine = s.refine;
    if (s.radial_curves == 0) throw ConfigError("radial_curves must be >= 1");
    if (s.eta_nodes) opt.eta = scenario_eta(s);
    const auto rep = verify_inequality(f, y0, s.r1, s.r2, s.p, opt);

    rb.check("inverse_poletsky_inequality", json{{"lhs_lower", rep.lhs_lower}, {"rhs", rep.rhs}},
             "lhs_lower <= rhs * (1 + tolerance)", s.tolerances.inequality, rep.inequality_holds);
    if (rep.analytic_matches) {
      rb.check("analytic_lhs_equals_rhs",
               json{{"lhs_analytic", *rep.lhs_analytic},
                    {"rhs_domain", rep.rhs_domain.value},
                    {"rhs_image", rep.rhs_image.value}},
               "|lhs_analytic - rhs_route| <= tolerance * lhs_analytic", s.tolerances.inequality,
               *rep.analytic_matches);
    }
    rb.check("route_consistency", rep.route_gap, "|domain - image| / image", s.tolerances.inequality,
             rep.routes_consistent);
    rb.check("rho_admissibility", rep.admissibility.pass_fraction, ">= 0.99 of lifted radial curves with int rho >= 0.99",
             0.01, rep.admissible);

    auto& d = rb.diagnostics();
    d["lhs_lower"] = rep.lhs_lower;
    d["lhs_primal_upper"] = rep.lhs_upper;
    d["lhs_semantics"] = "discrete modulus of a finite subfamily of Gamma_f (lower estimate)";
    if (rep.lhs_analytic) d["lhs_analytic"] = *rep.lhs_analytic;
    d["rhs_domain_route"] = route_json<N>(rep.rhs_domain);
    d["rhs_image_route"] = route_json<N>(rep.rhs_image);
    d["route_gap"] = rep.route_gap;
    d["eta"] = s.eta_nodes ? "tabulated" : "extremal";
    d["solver"] = json{{"iterations", rep.solver_iterations},
                       {"duality_gap", rep.solver_gap},
                       {"certified", rep.solver_certified}};
    d["curves"] = json{{"image", rep.image_curves},
                       {"lifted", rep.lifted_curves},
                       {"dropped_breaks", rep.dropped_breaks},
                       {"dropped_near_branch", rep.dropped_branch}};
    d["admissibility"] = json{{"pass_fraction", rep.admissibility.pass_fraction},
                              {"min_integral", rep.admissibility.min_integral},
                              {"curves", rep.admissibility.curves}};
    // K_CT at one image point on the positive first axis.
    Point<N> probe = y0;
    probe[0] += 0.5 * (s.r1 + s.r2);
    d["k_ct_probe"] = json{{"y", to_json_point<N>(probe)}, {"value", k_ct_point(f, probe, y0, s.p).value}};
    return rb.finish();
  } catch (const ConfigError& e) {
    return rb.fail(kConfigInvalid, e.what());
  } catch (const Error& e) {
    return rb.fail(kNumericFailure, e.what());
  }
}

template <std::size_t N>
CommandResult identity_check(const Scenario& s) {
  ReportBuilder rb("identity-check", s);
  try {
    const auto f = gallery<N>(s.map);
    if (!f.is_homeomorphism()) throw ConfigError("identity-check needs a homeomorphic map");
    if (s.samples == 0) throw ConfigError("samples must be >= 1");
    const Point<N> x0 = to_point<N>(s.x0);
    const double radius = s.map.domain_radius;
    std::optional<SmoothMap<N>> inverse;
    if (const auto spec = gallery_inverse<N>(s.map)) inverse = gallery<N>(*spec);

    std::mt19937_64 rng(s.seed);
    double max_res = 0.0, max_indep = 0.0, min_df = std::numeric_limits<double>::infinity(), max_df = 0.0;
    std::size_t used = 0, skipped = 0;
    for (std::size_t i = 0; i < s.samples; ++i) {
      const Point<N> x = sample_ball<N>(rng, Point<N>{}, radius);
      if (distance(x, x0) <= 1e-9 * radius || f.distance_to_branch_locus(x) <= kBranchExclusion) {
        ++skipped;
        continue;
      }
      try {
        const auto r = identity_residual(f, x, x0);
        max_res = std::max(max_res, r.residual);
        min_df = std::min(min_df, r.d_f);
        max_df = std::max(max_df, r.d_f);
        if (inverse) {
          const double k = k_ct_point(*inverse, x, x0, static_cast<double>(N)).value;
          max_indep = std::max(max_indep, std::abs(k - r.d_f));
        }
        ++used;
      } catch (const SingularMatrix&) {
        ++skipped;
      }
    }
    rb.check("identity_residual", max_res, "max |K_CT,n,x0(f(x), f^-1) - D_f(x, x0)|", s.tolerances.identity,
             used > 0 && max_res <= s.tolerances.identity);
    auto& d = rb.diagnostics();
    d["samples_used"] = used;
    d["samples_skipped"] = skipped;
    d["d_f_min"] = used ? min_df : 0.0;
    d["d_f_max"] = max_df;
    if (inverse) d["inverse_map_residual"] = max_indep;
    return rb.finish();
  } catch (const ConfigError& e) {
    return rb.fail(kConfigInvalid, e.what());
  } catch (const Error& e) {
    return rb.fail(kNumericFailure, e.what());
  }
}

template <std::size_t N>
CommandResult dilatation_field(const Scenario& s) {
  ReportBuilder rb("dilatation-field", s);
  try {
    const auto f = gallery<N>(s.map);
    const Point<N> y0 = to_point<N>(s.y0);
    const Point<N> x0 = to_point<N>(s.x0);
    const std::string q = s.quantity;
    std::ostringstream csv;
    for (std::size_t i = 0; i < N; ++i) csv << (i ? "," : "") << (q == "K_CT" || q == "K_I" ? "y" : "x") << i + 1;
    if (q == "mu") {
      if constexpr (N != 2) throw ConfigError("mu is only defined in the plane");
      csv << ",mu_re,mu_im\n";
    } else {
      csv << ',' << q << '\n';
    }

    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin, sum = 0.0;
    std::size_t count = 0, skipped = 0, ct_violations = 0, ki_violations = 0;
    double worst_ct_ratio = 0.0, min_ki = std::numeric_limits<double>::infinity();
    double mu_consistency = 0.0;
    const bool conformal_order = std::abs(s.p - static_cast<double>(N)) < 1e-12;

    auto emit = [&](const Point<N>& at, std::initializer_list<double> vals) {
      for (std::size_t i = 0; i < N; ++i) csv << (i ? "," : "") << format_number(at[i]);
      for (double v : vals) csv << ',' << format_number(v);
      csv << '\n';
    };
    auto tally = [&](double v) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
      sum += v;
      ++count;
    };

    if (q == "K_CT" || q == "K_I") {
      const auto ann = DomainDescriptor<N>::annulus(y0, s.r1, s.r2);
      const auto [lo, hi] = ann.bounding_box();
      const UniformGrid<N> grid(lo, hi, s.grid);
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Point<N> y = grid.center(c);
        if (!ann.interior(y)) continue;
        double kct, ki;
        try {
          kct = k_ct_point(f, y, y0, s.p).value;
          ki = k_i_point(f, y, s.p);
        } catch (const UndefinedValue&) {
          ++skipped;
          continue;
        }
        if (!std::isfinite(kct) || !std::isfinite(ki)) {
          ++skipped;
          continue;
        }
        if (kct > ki * (1.0 + 1e-12)) ++ct_violations;
        worst_ct_ratio = std::max(worst_ct_ratio, kct / ki);
        min_ki = std::min(min_ki, ki);
        if (conformal_order && ki < 1.0 - 1e-12) ++ki_violations;
        const double v = q == "K_CT" ? kct : ki;
        tally(v);
        emit(y, {v});
      }
      rb.check("k_ct_le_k_i", ct_violations, "samples with K_CT > K_I (1 + 1e-12)", 1e-12, ct_violations == 0);
      if (conformal_order) {
        rb.check("k_i_ge_one", min_ki, "min K_I at p = n", 1e-12, ki_violations == 0);
      }
    } else {
      const auto [lo, hi] = f.domain().bounding_box();
      const UniformGrid<N> grid(lo, hi, s.grid);
      for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        const Point<N> x = grid.center(c);
        if (!f.domain().interior(x) || distance(x, x0) == 0.0 ||
            f.distance_to_branch_locus(x) <= kBranchExclusion) {
          continue;
        }
        try {
          if (q == "D_f") {
            const double v = d_f_point(f, x, x0);
            tally(v);
            emit(x, {v});
          } else if constexpr (N == 2) {
            const auto mu = beltrami_mu(f.jacobian(x));
            const double v = std::abs(mu);
            tally(v);
            emit(x, {mu.real(), mu.imag()});
            if (v < 1.0) {
              mu_consistency = std::max(mu_consistency, std::abs(d_f_from_mu(mu, x, x0) - d_f_point(f, x, x0)));
            }
          }
        } catch (const SingularMatrix&) {
          ++skipped;
        }
      }
      if (q == "mu") {
        rb.check("d_f_from_mu_matches_d_f", mu_consistency, "max |D_f(mu) - D_f(f')|", 1e-8, mu_consistency <= 1e-8);
      }
    }
    if (count == 0) throw NumericError("dilatation-field: no valid sample points");
    csv << "# summary min=" << format_number(vmin) << " max=" << format_number(vmax)
        << " mean=" << format_number(sum / static_cast<double>(count)) << " count=" << count << '\n';

    auto& d = rb.diagnostics();
    d["quantity"] = q;
    d["samples"] = count;
    d["skipped"] = skipped;
    d["summary"] = json{{"min", vmin}, {"max", vmax}, {"mean", sum / static_cast<double>(count)}};
    if (q == "K_CT" || q == "K_I") d["max_k_ct_over_k_i"] = worst_ct_ratio;
    auto r = rb.finish();
    r.csv = csv.str();
    return r;
  } catch (const ConfigError& e) {
    return rb.fail(kConfigInvalid, e.what());
  } catch (const Error& e) {
    return rb.fail(kNumericFailure, e.what());
  }
}

template <std::size_t N>
CommandResult modulus(const Scenario& s) {
  ReportBuilder rb("modulus", s);
  try {
    const Point<N> y0 = to_point<N>(s.y0);
    const bool want_radial = s.family != "grid-paths";
    const bool want_paths = s.family != "radial";
    CurveFamily<N> fam;
    if (want_radial && s.radial_curves > 0) fam.append(radial_family<N>(y0, s.r1, s.r2, s.radial_curves));
    if (want_paths && s.grid_paths > 0) {
      fam.append(annulus_grid_paths<N>(y0, s.r1, s.r2, s.grid_path_resolution, s.grid_paths, s.seed));
    }
    if (fam.empty()) throw ConfigError("modulus: the requested curve family is empty");

    Point<N> lo = y0, hi = y0;
    for (std::size_t i = 0; i < N; ++i) {
      lo[i] -= s.r2;
      hi[i] += s.r2;
    }
    const UniformGrid<N> grid(lo, hi, s.grid);
    const auto est = discrete_modulus(fam, grid, s.p);
    const double analytic = ring_modulus_analytic(N, s.p, s.r1, s.r2);
    const auto upper = admissible_upper(fam, grid, extremal_eta(N, s.p, s.r1, s.r2), y0, s.p);
    const double rel = std::abs(est.value - analytic) / analytic;

    if (est.certified) {
      rb.check("oracle_agreement", json{{"discrete_lower", est.value}, {"analytic", analytic}},
               "|discrete - analytic| / analytic", s.tolerances.oracle, rel <= s.tolerances.oracle);
    } else {
      rb.deferred("oracle_agreement", json{{"discrete_lower", est.value}, {"analytic", analytic}},
                  "solver not certified", s.tolerances.oracle);
    }
    rb.check("bracket", json{{"discrete_lower", est.value}, {"admissible_upper", upper.value}},
             "discrete_lower <= admissible_upper", 1e-9, est.value <= upper.value * (1.0 + 1e-9));

    auto& d = rb.diagnostics();
    d["family"] = json{{"kind", s.family}, {"curves", fam.size()}, {"generator", to_string(fam.generator)}};
    d["estimate"] = json{{"value", est.value},
                         {"kind", to_string(est.kind)},
                         {"primal_value", est.primal_value},
                         {"iterations", est.iterations},
                         {"duality_gap", est.gap},
                         {"certified", est.certified},
                         {"grid", s.grid},
                         {"cells_touched", est.cells}};
    d["analytic"] = analytic;
    d["admissible_upper"] = upper.value;
    d["relative_error"] = rel;
    return rb.finish();
  } catch (const ConfigError& e) {
    return rb.fail(kConfigInvalid, e.what());
  } catch (const Error& e) {
    return rb.fail(kNumericFailure, e.what());
  }
}

}  // namespace detail

// Runs `command` on an already-parsed scenario. Validation errors yield
// exit code 2 before any computation.
inline CommandResult run(const std::string& command, Scenario s) {
  try {
    validate(s);
  } catch (const ConfigError& e) {
    CommandResult r;
    r.exit_code = kConfigInvalid;
    r.report = json{{"command", command}, {"pass", false}, {"failure", e.what()}, {"exit_code", kConfigInvalid}};
    return r;
  }
  auto dispatch = [&](auto fn2, auto fn3) { return s.dimension == 2 ? fn2(s) : fn3(s); };
  if (command == "verify-theorem") return dispatch(detail::verify_theorem<2>, detail::verify_theorem<3>);
  if (command == "identity-check") return dispatch(detail::identity_check<2>, detail::identity_check<3>);
  if (command == "dilatation-field") return dispatch(detail::dilatation_field<2>, detail::dilatation_field<3>);
  if (command == "modulus") return dispatch(detail::modulus<2>, detail::modulus<3>);
  CommandResult r;
  r.exit_code = kConfigInvalid;
  r.report = json{{"command", command}, {"pass", false}, {"failure", "unknown command"}, {"exit_code", kConfigInvalid}};
  return r;
}

// Report with the wall-clock section removed, for byte comparisons.
inline std::string stable_dump(json report) {
  report.erase("timings");
  return report.dump(2);
}

}  // namespace qcmod::cli

#endif  // QCMOD_CLI_COMMANDS_HPP
