#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epicurve/date.hpp"
#include "epicurve/ingest.hpp"

namespace epicurve {

/// Half width of the 13-day smoothing kernel.
inline constexpr int kKernelHalfWidth = 6;

/// Triangular kernel w_d = (7 - |d|) / 49 for d = -6..6; the convolution of
/// two centered 7-day boxcars.
std::array<double, 2 * kKernelHalfWidth + 1> smoothing_kernel();

struct SmoothedSeries {
  std::string unit_id;
  Date start_date;  // day index 0
  std::vector<double> values;
};

/// Throws ComputationError when the series is shorter than 13 days.
SmoothedSeries smooth(const RateSeries& series);

struct Peak {
  std::size_t day = 0;
  double value = 0.0;
  bool boundary = false;  // on the first or last smoothed day
};

/// Earliest argmax. Throws ComputationError when no value is positive.
Peak find_peak(const SmoothedSeries& series);

/// Smallest day t <= t_max with value >= (1 - alpha) * peak; nullopt when that
/// day is the first smoothed day (left-censored).
std::optional<std::size_t> left_crossing(const SmoothedSeries& series, double alpha);

/// Smallest day t > t_max from which every remaining value is strictly below
/// (1 - alpha) * peak; nullopt when the tail never drops (right-censored).
std::optional<std::size_t> right_crossing(const SmoothedSeries& series, double alpha);

struct FeatureOptions {
  /// Level used to locate the robust peak and curvature.
  double center_alpha = 0.1;
  /// Levels reported as left/right span features, named left90 ... left20.
  std::vector<double> span_alphas = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2};
  /// A peak closer than this to either edge is a boundary peak.
  std::size_t boundary_margin = kKernelHalfWidth;
};

/// Name of the span feature for `alpha` on one side ("left" or "right"),
/// e.g. alpha 0.9 -> "left90".
std::string span_feature_name(const std::string& side, double alpha);

struct CurveFeatures {
  std::size_t peakdate = 0;  // t_max, index into the smoothed series
  double peakvalue = 0.0;
  std::optional<std::int64_t> robust_peak;  // t0
  std::optional<std::int64_t> peak;         // t_max - t0
  std::optional<std::int64_t> curvature;    // t_{0.1} - t_{-0.1}
  std::vector<std::optional<std::int64_t>> left;   // aligned with span_alphas
  std::vector<std::optional<std::int64_t>> right;  // aligned with span_alphas
  bool boundary_peak = false;
  std::vector<std::string> warnings;
};

/// Extracts the shape features. A boundary peak yields a warning and leaves
/// every robust-peak dependent field empty; otherwise a censored centering
/// crossing throws ComputationError("cannot center curve").
CurveFeatures extract_features(const SmoothedSeries& series, const FeatureOptions& options = {});

/// Names of the shape features in canonical order:
/// peak, peakvalue, left90..left20, right90..right20.
std::vector<std::string> shape_feature_names(const FeatureOptions& options = {});

/// Column order of the feature CSV (after unit_id).
std::vector<std::string> feature_csv_columns(const FeatureOptions& options = {});

}  // namespace epicurve
