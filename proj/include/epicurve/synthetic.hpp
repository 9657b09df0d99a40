#pragma once

#include <cstdint>
#include <string>

#include "epicurve/ingest.hpp"

namespace epicurve {

/// Generator for a demonstration dataset with a built-in geographic effect:
/// North units grow steeply, South units grow slowly, and both decline with
/// the same distribution of widths.
struct SyntheticOptions {
  int units = 84;  // first half North, second half South
  std::uint64_t seed = 2022;
  StudyWindow window;
  int margin_days = 14;  // data extends this far beyond the window on each side
  double north_growth_min = 5.0, north_growth_max = 9.0;    // growth-side Gaussian sigma, days
  double south_growth_min = 13.0, south_growth_max = 19.0;
  double decline_min = 20.0, decline_max = 28.0;
  int peak_offset_min = 55, peak_offset_max = 75;  // days after window start
  double peak_rate_min = 80.0, peak_rate_max = 400.0;  // per 100,000 per day
  double noise_cv = 0.08;
  double weekly_amplitude = 0.15;
};

struct SyntheticDataset {
  CaseSeriesSet cases;
  MetaRegistry meta;
};

SyntheticDataset make_synthetic_geography(const SyntheticOptions& options = {});

/// Example JSON configuration wired to `cases.csv` and `metadata.csv`.
std::string example_config_json();

}  // namespace epicurve
