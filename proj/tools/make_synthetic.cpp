// Writes a synthetic 84-district dataset (cases.csv, metadata.csv) and an
// example config.json into the given directory.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "epicurve/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic dataset for the epicurve pipeline"};
  std::filesystem::path out = "synthetic";
  epicurve::SyntheticOptions options;
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", options.seed, "generator seed");
  app.add_option("--units", options.units, "number of units (first half North)")->check(CLI::Range(2, 168));
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out);
  const auto data = epicurve::make_synthetic_geography(options);
  std::ofstream cases(out / "cases.csv");
  epicurve::write_case_series(cases, data.cases);
  std::ofstream meta(out / "metadata.csv");
  epicurve::write_unit_metadata(meta, data.meta);
  std::ofstream config(out / "config.json");
  config << epicurve::example_config_json();
  if (!cases || !meta || !config) {
    std::cerr << "error: failed writing to " << out << '\n';
    return 3;
  }
  std::cout << "wrote " << data.cases.size() << " units to " << out.string() << '\n';
  return 0;
}
