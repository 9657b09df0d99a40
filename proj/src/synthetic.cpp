#include "epicurve/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "epicurve/rng.hpp"

namespace epicurve {

namespace {

constexpr std::array<const char*, 7> kNorthCities = {"TP", "NT", "KL", "TY", "HC", "ML", "IL"};
constexpr std::array<const char*, 7> kSouthCities = {"TC", "TN", "KS", "CY", "CH", "PT", "YL"};

double between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

}  // namespace

SyntheticDataset make_synthetic_geography(const SyntheticOptions& o) {
  SyntheticDataset data;
  Rng rng(o.seed, 0);
  const int north = o.units / 2;
  const Date start = o.window.start - std::chrono::days{o.margin_days};
  const int length = static_cast<int>((o.window.end - o.window.start).count()) + 1 + 2 * o.margin_days;

  for (int u = 0; u < o.units; ++u) {
    const bool is_north = u < north;
    const int local = is_north ? u : u - north;
    const auto& cities = is_north ? kNorthCities : kSouthCities;
    UnitMeta meta;
    meta.city_code = cities[static_cast<std::size_t>(local / 12) % cities.size()];
    meta.district_letter = static_cast<char>('a' + local % 12);
    meta.unit_id = meta.city_code + meta.district_letter;
    meta.region = is_north ? Region::North : Region::South;
    meta.status = rng.uniform() < 0.5 ? Settlement::Urban : Settlement::Suburban;
    meta.population = 50000 + static_cast<std::int64_t>(rng.below(350000));

    const double growth = is_north ? between(rng, o.north_growth_min, o.north_growth_max)
                                   : between(rng, o.south_growth_min, o.south_growth_max);
    const double decline = between(rng, o.decline_min, o.decline_max);
    const double peak_day =
        o.margin_days + o.peak_offset_min + static_cast<double>(rng.below(o.peak_offset_max - o.peak_offset_min + 1));
    const double peak_rate = between(rng, o.peak_rate_min, o.peak_rate_max);

    RawSeries series{meta.unit_id, start, {}};
    for (int t = 0; t < length; ++t) {
      const double dt = t - peak_day;
      const double sigma = dt <= 0 ? growth : decline;
      double rate = peak_rate * (0.005 + std::exp(-dt * dt / (2.0 * sigma * sigma)));
      rate *= 1.0 + o.weekly_amplitude * std::sin(2.0 * std::numbers::pi * t / 7.0);
      rate *= std::max(0.0, 1.0 + o.noise_cv * rng.normal());
      const double expected = rate * static_cast<double>(meta.population) / 100000.0;
      series.counts.push_back(static_cast<std::int64_t>(std::llround(expected)));
    }
    data.cases.emplace(meta.unit_id, std::move(series));
    data.meta.emplace(meta.unit_id, std::move(meta));
  }
  return data;
}

std::string example_config_json() {
  return R"({
  "cases": "cases.csv",
  "metadata": "metadata.csv",
  "output_dir": "out",
  "window": {"start": "2022-03-25", "end": "2022-08-19"},
  "n_bins": 4,
  "network_thresholds": [0.6, 0.7],
  "fusions": [
    {"name": "left30to50", "columns": ["left30", "left40", "left50"], "k": 4, "seed": 1},
    {"name": "left30to60", "columns": ["left30", "left40", "left50", "left60"], "k": 4, "seed": 1},
    {"name": "left30to70", "columns": ["left30", "left40", "left50", "left60", "left70"], "k": 4, "seed": 1},
    {"name": "right30to50", "columns": ["right30", "right40", "right50"], "k": 4, "seed": 1},
    {"name": "right30to60", "columns": ["right30", "right40", "right50", "right60"], "k": 4, "seed": 1},
    {"name": "right30to70", "columns": ["right30", "right40", "right50", "right60", "right70"], "k": 4, "seed": 1}
  ],
  "responses": [
    {"name": "peakvalue", "response": "peakvalue", "order": 2, "seed": 7,
     "exclude": ["left30to50", "left30to60", "left30to70", "right30to50", "right30to60", "right30to70"]},
    {"name": "region", "response": "region", "order": 2, "seed": 7,
     "candidates": ["left30to50", "left30to60", "left30to70", "right30to50", "right30to60", "right30to70"]},
    {"name": "status", "response": "status", "order": 2, "seed": 7,
     "candidates": ["left30to50", "left30to60", "left30to70", "right30to50", "right30to60", "right30to70"]}
  ],
  "clusterings": [
    {"name": "left", "columns": ["left90", "left80", "left70", "left60", "left50", "left40", "left30", "left20"]}
  ],
  "top": 5,
  "bottom": 1
}
)";
}

}  // namespace epicurve
