#include <fstream>
#include <sstream>

#include "doctest.h"
#include "epicurve/errors.hpp"
#include "epicurve/feature_table.hpp"
#include "epicurve/pipeline.hpp"
#include "test_support.hpp"

using namespace epicurve;
using testing_support::scratch_dir;
using testing_support::slurp;
using testing_support::write_synthetic_project;

namespace {

const char* kMinimal = R"({"cases": "c.csv", "metadata": "m.csv"})";

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto c = parse_config(kMinimal, "/data");
  CHECK(c.cases == std::filesystem::path("/data/c.csv"));
  CHECK(c.n_bins == 4);
  CHECK(c.window == StudyWindow{});
  CHECK(c.network_thresholds == std::vector<double>{0.6, 0.7});

  CHECK_THROWS_AS(parse_config(R"({"cases": "c.csv", "metadata": "m.csv", "colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"metadata": "m.csv"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"cases": "c.csv", "metadata": "m.csv", "n_bins": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"cases": "c.csv", "metadata": "m.csv", "network_thresholds": [1.2]})"),
                  ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"cases": "c.csv", "metadata": "m.csv",
      "fusions": [{"name": "f", "columns": ["left15", "left20"]}]})"),
                       doctest::Contains("unknown column 'left15'"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"cases": "c.csv", "metadata": "m.csv",
      "responses": [{"response": "region", "order": 4}]})"),
                  ConfigError);
}

TEST_CASE("config serialization round trip") {
  const auto c = parse_config(example_config_json(), "/data");
  const auto again = parse_config(serialize_config(c), "/elsewhere");
  CHECK(again == c);
}

TEST_CASE("stages") {
  for (auto s : {Stage::Features, Stage::Associate, Stage::Fuse, Stage::Select, Stage::Cluster, Stage::Report})
    CHECK(parse_stage(stage_name(s)) == s);
  CHECK_FALSE(parse_stage("all").has_value());
}

TEST_CASE("a stage without its inputs names the missing subcommand") {
  const auto dir = scratch_dir("missing_upstream");
  auto config = load_config(write_synthetic_project(dir, 12));
  std::ostringstream log;
  CHECK_THROWS_WITH_AS(run_stage(Stage::Select, config, log), doctest::Contains("run `features` first"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(run_stage(Stage::Report, config, log), doctest::Contains("first"), ConfigError);
}

TEST_CASE("missing input files are data errors") {
  const auto dir = scratch_dir("missing_input");
  auto config = parse_config(kMinimal, dir);
  std::ostringstream log;
  CHECK_THROWS_AS(run_stage(Stage::Features, config, log), DataError);
}

TEST_CASE("stage-by-stage runs reproduce the full pipeline") {
  const auto dir_all = scratch_dir("compose_all");
  const auto dir_staged = scratch_dir("compose_staged");
  auto all_config = load_config(write_synthetic_project(dir_all, 24));
  auto staged_config = load_config(write_synthetic_project(dir_staged, 24));

  std::ostringstream log;
  const auto manifest = run_pipeline(all_config, log);
  for (auto s : {Stage::Features, Stage::Associate, Stage::Fuse, Stage::Select, Stage::Cluster, Stage::Report})
    run_stage(s, staged_config, log);

  const auto a = slurp(manifest);
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(staged_config.output_dir / "manifest.txt"));

  for (const char* name : {"features.csv", "categories.csv", "bins.csv", "assoc_directed.csv", "assoc_mutual.csv",
                           "network_directed_0.6.dot", "network_mutual_0.7.dot", "features_fused.csv",
                           "scan_region_order1.csv", "scan_region_order2.csv", "tree_left.csv", "codes_left.csv",
                           "similarity_left.csv", "heatmap_left.svg", "report_region.txt", "report_region.md"})
    CHECK_MESSAGE(std::filesystem::exists(all_config.output_dir / name), name);

  const auto features = read_feature_table(all_config.output_dir / "features.csv");
  CHECK(features.rows() == 24);
  CHECK(features.names.front() == "peakdate");
}

TEST_CASE("minimal configuration on three units") {
  const auto dir = scratch_dir("three_units");
  SyntheticOptions opts;
  opts.units = 3;
  const auto data = make_synthetic_geography(opts);
  {
    std::ofstream cases(dir / "cases.csv");
    write_case_series(cases, data.cases);
    std::ofstream meta(dir / "metadata.csv");
    write_unit_metadata(meta, data.meta);
  }
  auto config = parse_config(R"({"cases": "cases.csv", "metadata": "metadata.csv", "n_bins": 2,
      "association_features": ["peakvalue", "left50", "right50"],
      "responses": [{"response": "peakvalue", "candidates": ["left50", "right50"], "order": 1, "replicates": 20}]})",
                             dir);
  std::ostringstream log;
  const auto manifest = slurp(run_pipeline(config, log));
  for (const char* name : {"features.csv", "assoc_directed.csv", "assoc_mutual.csv", "report_peakvalue.txt"})
    CHECK_MESSAGE(manifest.find(std::string("  ") + name + "\n") != std::string::npos, name);
}

TEST_CASE("feature table round trip") {
  FeatureTable t;
  t.unit_ids = {"a", "b", "c"};
  t.add_column("peakdate", {19000.0, std::nullopt, 19010.0});
  t.add_column("peakvalue", {0.1 + 0.2, 1e-300, 123456.789});
  t.add_column("left50", {std::nullopt, 3.0, -2.0});
  std::ostringstream out;
  write_feature_table(out, t);
  CHECK(out.str().find("2022-01-08") != std::string::npos);
  std::istringstream in(out.str());
  CHECK(read_feature_table(in) == t);
  CHECK_THROWS_AS(t.index_of("left15"), ConfigError);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
