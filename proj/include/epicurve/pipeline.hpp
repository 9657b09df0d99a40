#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epicurve/ingest.hpp"

namespace epicurve {

struct FusionSpec {
  std::string name;
  std::vector<std::string> columns;
  int k = 4;
  std::uint64_t seed = 1;
  int restarts = 100;

  friend bool operator==(const FusionSpec&, const FusionSpec&) = default;
};

/// A response is a feature (discretized) or a metadata field: region,
/// status, age_group, city_code or district_letter.
struct ResponseSpec {
  std::string name;
  std::string response;
  std::vector<std::string> candidates;  // empty: every other discretized or fused column
  std::vector<std::string> exclude;
  int order = 2;
  int replicates = 200;
  std::uint64_t seed = 1;

  friend bool operator==(const ResponseSpec&, const ResponseSpec&) = default;
};

struct ClusteringSpec {
  std::string name;
  std::vector<std::string> columns;
  bool standardize = false;

  friend bool operator==(const ClusteringSpec&, const ClusteringSpec&) = default;
};

struct PipelineConfig {
  std::filesystem::path cases;
  std::filesystem::path metadata;
  StudyWindow window;
  double rate_scale = kDefaultRateScale;
  std::vector<double> alpha_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int n_bins = 4;
  std::vector<double> network_thresholds = {0.6, 0.7};
  std::vector<std::string> association_features;  // empty: the 18 shape features
  std::vector<FusionSpec> fusions;
  std::vector<ResponseSpec> responses;
  std::vector<ClusteringSpec> clusterings;
  std::filesystem::path output_dir = "out";
  int top = 5;
  int bottom = 1;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Parses the JSON configuration. Relative paths resolve against `base_dir`.
/// Throws ConfigError; the result is validated.
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& config);

/// Checks ranges and that every referenced column exists once features and
/// fusions are computed.
void validate_config(const PipelineConfig& config);

/// Discretized columns produced by the pipeline: peakdate, curvature and the
/// shape features.
std::vector<std::string> discretized_columns(const PipelineConfig& config);

enum class Stage { Features, Associate, Fuse, Select, Cluster, Report };

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

/// Runs one stage, reading upstream artifacts from the output directory, then
/// rewrites the manifest. Throws ConfigError naming the prior subcommand when
/// an upstream artifact is missing; other errors are prefixed with the stage.
void run_stage(Stage stage, const PipelineConfig& config, std::ostream& log);

/// Runs every stage in order and returns the manifest path.
std::filesystem::path run_pipeline(const PipelineConfig& config, std::ostream& log);

/// Writes `manifest.txt` with `sha256  relative/path` lines for every other
/// file under `dir`, sorted by path.
std::filesystem::path write_manifest(const std::filesystem::path& dir);

std::string sha256_hex(std::string_view data);

}  // namespace epicurve
