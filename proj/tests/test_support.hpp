#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "epicurve/synthetic.hpp"
#include "json.hpp"

namespace testing_support {

// Scratch directory under the build tree, emptied on construction.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::current_path() / "scratch" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Writes cases.csv, metadata.csv and config.json. Non-positive replicates or
// restarts keep the example configuration's values.
inline std::filesystem::path write_synthetic_project(const std::filesystem::path& dir, int units = 84,
                                                     int replicates = 40, int restarts = 10) {
  epicurve::SyntheticOptions opts;
  opts.units = units;
  const auto data = epicurve::make_synthetic_geography(opts);
  {
    std::ofstream cases(dir / "cases.csv");
    epicurve::write_case_series(cases, data.cases);
    std::ofstream meta(dir / "metadata.csv");
    epicurve::write_unit_metadata(meta, data.meta);
  }
  auto config = nlohmann::json::parse(epicurve::example_config_json());
  if (restarts > 0)
    for (auto& f : config["fusions"]) f["restarts"] = restarts;
  if (replicates > 0)
    for (auto& r : config["responses"]) r["replicates"] = replicates;
  const auto path = dir / "config.json";
  std::ofstream(path) << config.dump(2) << '\n';
  return path;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace testing_support
