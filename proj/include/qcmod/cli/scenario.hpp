#ifndef QCMOD_CLI_SCENARIO_HPP
#define QCMOD_CLI_SCENARIO_HPP

// Scenario files: one JSON object per run. Unknown keys are rejected, and
// the resolved scenario (defaults filled in) is echoed into every report.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcmod/errors.hpp"
#include "qcmod/linalg.hpp"
#include "qcmod/maps.hpp"

namespace qcmod::cli {

using json = nlohmann::ordered_json;

struct Tolerances {
  double inequality = 0.02;
  double identity = 1e-8;
  double oracle = 0.05;
};

struct Scenario {
  MapSpec map;
  bool domain_radius_given = false;
  std::size_t dimension = 2;
  std::vector<double> y0;
  std::vector<double> x0;
  double r1 = 1.0;
  double r2 = std::exp(1.0);
  double p = 2.0;
  std::size_t grid = 256;
  std::size_t image_grid = 256;
  std::size_t admissibility_grid = 1024;
  std::size_t radial_curves = 512;
  std::size_t grid_paths = 64;
  std::size_t grid_path_resolution = 64;
  std::uint64_t seed = 1;
  std::size_t samples = 100;
  std::string quantity = "K_CT";
  std::string family = "radial+grid-paths";
  bool refine = false;
  std::optional<std::vector<double>> eta_nodes;
  std::optional<std::vector<double>> eta_values;
  Tolerances tolerances;
  std::string report_path;
  std::string csv_path;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T get_as(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

inline bool power_of_two_in_range(std::size_t v) {
  return v >= 32 && v <= 1024 && (v & (v - 1)) == 0;
}

}  // namespace detail

// Ball radius covering f^{-1}(B(y0, |y0| + r2)) for the gallery maps.
inline double default_domain_radius(const Scenario& s) {
  double y0n = 0.0;
  for (double v : s.y0) y0n += v * v;
  const double reach = std::sqrt(y0n) + s.r2;
  const auto& m = s.map;
  if (m.name == "radial") return std::pow(reach, 1.0 / m.alpha);
  if (m.name == "winding") return std::pow(reach, 1.0 / std::max(1, m.k));
  if (m.name == "linear") {
    if (s.dimension == 2 && m.matrix.size() == 4) {
      Matrix<2> a{m.matrix[0], m.matrix[1], m.matrix[2], m.matrix[3]};
      const double smin = min_singular(a);
      if (smin > 0.0) return reach / smin;
    } else if (s.dimension == 3 && m.matrix.size() == 9) {
      Matrix<3> a;
      std::copy(m.matrix.begin(), m.matrix.end(), a.a.begin());
      const double smin = min_singular(a);
      if (smin > 0.0) return reach / smin;
    }
    throw ConfigError("linear map: matrix must be nondegenerate with dimension^2 entries");
  }
  return reach;
}

inline void validate(Scenario& s) {
  if (s.dimension != 2 && s.dimension != 3) throw ConfigError("dimension must be 2 or 3");
  if (s.y0.empty()) s.y0.assign(s.dimension, 0.0);
  if (s.x0.empty()) s.x0 = s.y0;
  if (s.y0.size() != s.dimension || s.x0.size() != s.dimension) {
    throw ConfigError("y0 and x0 must have 'dimension' coordinates");
  }
  if (!(s.p > 1.0) || !std::isfinite(s.p)) throw ConfigError("p must satisfy p > 1");
  if (!(s.r1 > 0.0) || !(s.r2 > s.r1) || !std::isfinite(s.r2)) throw ConfigError("radii must satisfy 0 < r1 < r2");
  for (auto [name, v] : {std::pair{"grid", s.grid}, std::pair{"image_grid", s.image_grid},
                         std::pair{"admissibility_grid", s.admissibility_grid},
                         std::pair{"grid_path_resolution", s.grid_path_resolution}}) {
    if (!detail::power_of_two_in_range(v)) {
      throw ConfigError(std::string(name) + " must be a power of two between 32 and 1024");
    }
  }
  static const std::set<std::string> quantities{"K_CT", "K_I", "D_f", "mu"};
  if (!quantities.count(s.quantity)) throw ConfigError("quantity must be one of K_CT, K_I, D_f, mu");
  static const std::set<std::string> families{"radial", "grid-paths", "radial+grid-paths"};
  if (!families.count(s.family)) throw ConfigError("family must be radial, grid-paths or radial+grid-paths");
  if (s.map.name == "winding" && s.dimension != 2) throw ConfigError("winding map requires dimension 2");
  if (s.map.name == "winding" && s.map.k < 1) throw ConfigError("winding: k must be >= 1");
  if (s.map.name == "radial" && !(s.map.alpha > 0.0)) throw ConfigError("radial: alpha must be > 0");
  if (s.eta_nodes.has_value() != s.eta_values.has_value()) {
    throw ConfigError("eta needs both 'nodes' and 'values'");
  }
  if (!s.domain_radius_given) s.map.domain_radius = default_domain_radius(s);
  if (!(s.map.domain_radius > 0.0)) throw ConfigError("domain_radius must be > 0");
  for (auto t : {s.tolerances.inequality, s.tolerances.identity, s.tolerances.oracle}) {
    if (!(t >= 0.0)) throw ConfigError("tolerances must be >= 0");
  }
}

inline Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  detail::reject_unknown(j,
                         {"map", "dimension", "y0", "x0", "r1", "r2", "p", "grid", "image_grid",
                          "admissibility_grid", "radial_curves", "grid_paths", "grid_path_resolution", "seed",
                          "samples", "quantity", "family", "refine", "eta", "tolerances", "output"},
                         "scenario");
  Scenario s;
  const std::string w = "scenario";
  if (j.contains("dimension")) s.dimension = detail::get_as<std::size_t>(j, "dimension", w);
  if (j.contains("map")) {
    const json& m = j.at("map");
    if (!m.is_object()) throw ConfigError("map must be an object");
    detail::reject_unknown(m, {"name", "dimension", "alpha", "k", "matrix", "domain_radius"}, "map");
    if (m.contains("name")) s.map.name = detail::get_as<std::string>(m, "name", "map");
    if (m.contains("dimension")) {
      const auto d = detail::get_as<std::size_t>(m, "dimension", "map");
      if (j.contains("dimension") && d != s.dimension) throw ConfigError("map.dimension disagrees with dimension");
      s.dimension = d;
    }
    if (m.contains("alpha")) s.map.alpha = detail::get_as<double>(m, "alpha", "map");
    if (m.contains("k")) s.map.k = detail::get_as<int>(m, "k", "map");
    if (m.contains("matrix")) s.map.matrix = detail::get_as<std::vector<double>>(m, "matrix", "map");
    if (m.contains("domain_radius")) {
      s.map.domain_radius = detail::get_as<double>(m, "domain_radius", "map");
      s.domain_radius_given = true;
    }
  }
  if (j.contains("y0")) s.y0 = detail::get_as<std::vector<double>>(j, "y0", w);
  if (j.contains("x0")) s.x0 = detail::get_as<std::vector<double>>(j, "x0", w);
  if (j.contains("r1")) s.r1 = detail::get_as<double>(j, "r1", w);
  if (j.contains("r2")) s.r2 = detail::get_as<double>(j, "r2", w);
  if (j.contains("p")) s.p = detail::get_as<double>(j, "p", w);
  if (j.contains("grid")) {
    s.grid = detail::get_as<std::size_t>(j, "grid", w);
    s.image_grid = s.grid;
  }
  if (j.contains("image_grid")) s.image_grid = detail::get_as<std::size_t>(j, "image_grid", w);
  if (j.contains("admissibility_grid")) s.admissibility_grid = detail::get_as<std::size_t>(j, "admissibility_grid", w);
  if (j.contains("radial_curves")) s.radial_curves = detail::get_as<std::size_t>(j, "radial_curves", w);
  if (j.contains("grid_paths")) s.grid_paths = detail::get_as<std::size_t>(j, "grid_paths", w);
  if (j.contains("grid_path_resolution")) {
    s.grid_path_resolution = detail::get_as<std::size_t>(j, "grid_path_resolution", w);
  }
  if (j.contains("seed")) s.seed = detail::get_as<std::uint64_t>(j, "seed", w);
  if (j.contains("samples")) s.samples = detail::get_as<std::size_t>(j, "samples", w);
  if (j.contains("quantity")) s.quantity = detail::get_as<std::string>(j, "quantity", w);
  if (j.contains("family")) s.family = detail::get_as<std::string>(j, "family", w);
  if (j.contains("refine")) s.refine = detail::get_as<bool>(j, "refine", w);
  if (j.contains("eta")) {
    const json& e = j.at("eta");
    if (!e.is_object()) throw ConfigError("eta must be an object");
    detail::reject_unknown(e, {"nodes", "values"}, "eta");
    if (e.contains("nodes")) s.eta_nodes = detail::get_as<std::vector<double>>(e, "nodes", "eta");
    if (e.contains("values")) s.eta_values = detail::get_as<std::vector<double>>(e, "values", "eta");
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    detail::reject_unknown(t, {"inequality", "identity", "oracle"}, "tolerances");
    if (t.contains("inequality")) s.tolerances.inequality = detail::get_as<double>(t, "inequality", "tolerances");
    if (t.contains("identity")) s.tolerances.identity = detail::get_as<double>(t, "identity", "tolerances");
    if (t.contains("oracle")) s.tolerances.oracle = detail::get_as<double>(t, "oracle", "tolerances");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (!o.is_object()) throw ConfigError("output must be an object");
    detail::reject_unknown(o, {"report", "csv"}, "output");
    if (o.contains("report")) s.report_path = detail::get_as<std::string>(o, "report", "output");
    if (o.contains("csv")) s.csv_path = detail::get_as<std::string>(o, "csv", "output");
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_scenario(j);
}

// The fully resolved scenario, defaults included.
inline json to_json(const Scenario& s) {
  json m;
  m["name"] = s.map.name;
  m["dimension"] = s.dimension;
  if (s.map.name == "radial") m["alpha"] = s.map.alpha;
  if (s.map.name == "winding") m["k"] = s.map.k;
  if (s.map.name == "linear") m["matrix"] = s.map.matrix;
  m["domain_radius"] = s.map.domain_radius;

  json j;
  j["map"] = m;
  j["dimension"] = s.dimension;
  j["y0"] = s.y0;
  j["x0"] = s.x0;
  j["r1"] = s.r1;
  j["r2"] = s.r2;
  j["p"] = s.p;
  j["grid"] = s.grid;
  j["image_grid"] = s.image_grid;
  j["admissibility_grid"] = s.admissibility_grid;
  j["radial_curves"] = s.radial_curves;
  j["grid_paths"] = s.grid_paths;
  j["grid_path_resolution"] = s.grid_path_resolution;
  j["seed"] = s.seed;
  j["samples"] = s.samples;
  j["quantity"] = s.quantity;
  j["family"] = s.family;
  j["refine"] = s.refine;
  if (s.eta_nodes) j["eta"] = json{{"nodes", *s.eta_nodes}, {"values", *s.eta_values}};
  j["tolerances"] = json{{"inequality", s.tolerances.inequality},
                         {"identity", s.tolerances.identity},
                         {"oracle", s.tolerances.oracle}};
  json o = json::object();
  if (!s.report_path.empty()) o["report"] = s.report_path;
  if (!s.csv_path.empty()) o["csv"] = s.csv_path;
  j["output"] = o;
  return j;
}

}  // namespace qcmod::cli

#endif  // QCMOD_CLI_SCENARIO_HPP
