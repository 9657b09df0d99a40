// Command-line driver for the curve-feature analysis pipeline.
//
//   epicurve <subcommand> --config <path> [--out <dir>] [--seed <int>]
//            [--top <int>] [--bottom <int>]
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 computation error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "epicurve/errors.hpp"
#include "epicurve/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> top;
  std::optional<int> bottom;
};

epicurve::PipelineConfig load(const Options& o) {
  auto config = epicurve::load_config(o.config);
  if (o.out) config.output_dir = *o.out;
  if (o.seed) {
    for (auto& f : config.fusions) f.seed = *o.seed;
    for (auto& r : config.responses) r.seed = *o.seed;
  }
  if (o.top) config.top = *o.top;
  if (o.bottom) config.bottom = *o.bottom;
  epicurve::validate_config(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curve-shape feature extraction and information-theoretic association analysis"};
  app.require_subcommand(1);

  Options options;
  const char* names[] = {"features", "associate", "select", "fuse", "cluster", "report", "all"};
  const char* help[] = {"extract shape features from the case and metadata files",
                        "discretize features and build association matrices and networks",
                        "run conditional-entropy scans for each configured response",
                        "fuse feature segments with k-means",
                        "build Ward.D2 trees, leaf codes and similarity heatmaps",
                        "render ranked conditional-entropy tables",
                        "run every stage in order"};
  for (int i = 0; i < 7; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", options.config, "JSON configuration file")->required();
    sub->add_option("--out", options.out, "output directory (overrides the config)");
    sub->add_option("--seed", options.seed, "seed applied to every fusion and response");
    sub->add_option("--top", options.top, "top-ranked rows per report");
    sub->add_option("--bottom", options.bottom, "bottom-ranked rows per report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto config = load(options);
    if (command == "all") {
      const auto manifest = epicurve::run_pipeline(config, std::cerr);
      std::cout << manifest.string() << '\n';
    } else {
      epicurve::run_stage(*epicurve::parse_stage(command), config, std::cerr);
    }
  } catch (const epicurve::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const epicurve::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
