// qcmod: scenario-driven front end.
//
//   qcmod verify-theorem   --config ring.json [--out report.json]
//   qcmod identity-check   --config radial.json --samples 1000
//   qcmod dilatation-field --config winding.json --quantity K_CT --out field.csv
//   qcmod modulus          --config ring.json --grid 128

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcmod/cli/commands.hpp"

namespace {

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse Poletsky inequality verification"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> samples;
  std::optional<std::string> quantity;

  const char* names[] = {"verify-theorem", "identity-check", "dilatation-field", "modulus"};
  const char* blurbs[] = {"check the ring inequality for one scenario",
                          "compare K_CT of the inverse with the tangential dilatation",
                          "sample a dilatation field to CSV",
                          "discrete p-modulus of a ring curve family"};
  for (int i = 0; i < 4; ++i) {
    auto* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", config, "scenario JSON file")->required();
    sub->add_option("--out", out, i == 2 ? "CSV output path" : "report output path");
    sub->add_option("--seed", seed, "random seed override");
    sub->add_option("--grid", grid, "grid resolution override (power of two, 32..1024)");
    sub->add_option("--quantity", quantity, "K_CT, K_I, D_f or mu");
    sub->add_option("--samples", samples, "sample count for identity-check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qcmod::cli::kConfigInvalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  qcmod::cli::Scenario s;
  try {
    s = qcmod::cli::load_scenario(config);
  } catch (const qcmod::ConfigError& e) {
    std::cerr << "qcmod: " << e.what() << '\n';
    return qcmod::cli::kConfigInvalid;
  }
  if (seed) s.seed = *seed;
  if (grid) s.grid = s.image_grid = *grid;
  if (samples) s.samples = *samples;
  if (quantity) s.quantity = *quantity;

  auto result = qcmod::cli::run(command, s);
  const std::string report = result.report.dump(2) + "\n";

  if (command == "dilatation-field") {
    const std::string csv_path = !out.empty() ? out : s.csv_path;
    if (!result.csv.empty()) {
      if (csv_path.empty()) {
        std::cout << result.csv;
      } else if (!write_text(csv_path, result.csv)) {
        std::cerr << "qcmod: cannot write " << csv_path << '\n';
        return qcmod::cli::kConfigInvalid;
      }
    }
    if (!s.report_path.empty()) {
      write_text(s.report_path, report);
    } else {
      std::cerr << report;
    }
  } else {
    const std::string path = !out.empty() ? out : s.report_path;
    if (path.empty()) {
      std::cout << report;
    } else if (!write_text(path, report)) {
      std::cerr << "qcmod: cannot write " << path << '\n';
      return qcmod::cli::kConfigInvalid;
    }
  }
  if (result.exit_code != 0 && result.report.contains("failure")) {
    std::cerr << "qcmod: " << result.report["failure"].get<std::string>() << '\n';
  }
  return result.exit_code;
}
