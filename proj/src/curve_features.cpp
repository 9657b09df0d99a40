#include "epicurve/curve_features.hpp"

#include <cmath>
#include <cstdlib>

#include "epicurve/errors.hpp"

namespace epicurve {

std::array<double, 2 * kKernelHalfWidth + 1> smoothing_kernel() {
  std::array<double, 2 * kKernelHalfWidth + 1> w{};
  for (int d = -kKernelHalfWidth; d <= kKernelHalfWidth; ++d) {
    w[d + kKernelHalfWidth] = (7.0 - std::abs(d)) / 49.0;
  }
  return w;
}

SmoothedSeries smooth(const RateSeries& series) {
  const std::size_t width = 2 * kKernelHalfWidth + 1;
  if (series.rates.size() < width) {
    throw ComputationError("series too short to smooth for unit " + series.unit_id + ": " +
                           std::to_string(series.rates.size()) + " days, need " + std::to_string(width));
  }
  SmoothedSeries out{series.unit_id, series.start_date + std::chrono::days{kKernelHalfWidth}, {}};
  const std::size_t n = series.rates.size() - 2 * kKernelHalfWidth;
  out.values.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    // Integer weights 7 - |d| summed first; one division keeps rounding low.
    double acc = 0.0;
    for (int d = -kKernelHalfWidth; d <= kKernelHalfWidth; ++d) {
      acc += (7 - std::abs(d)) * series.rates[t + kKernelHalfWidth + d];
    }
    out.values[t] = acc / 49.0;
  }
  return out;
}

Peak find_peak(const SmoothedSeries& series) {
  if (series.values.empty()) throw ComputationError("empty smoothed series for unit " + series.unit_id);
  Peak peak;
  peak.value = series.values.front();
  for (std::size_t t = 1; t < series.values.size(); ++t) {
    if (series.values[t] > peak.value) {
      peak.value = series.values[t];
      peak.day = t;
    }
  }
  if (!(peak.value > 0.0)) throw ComputationError("no infection signal for unit " + series.unit_id);
  peak.boundary = peak.day == 0 || peak.day + 1 == series.values.size();
  return peak;
}

std::optional<std::size_t> left_crossing(const SmoothedSeries& series, double alpha) {
  const Peak peak = find_peak(series);
  const double threshold = (1.0 - alpha) * peak.value;
  for (std::size_t t = 0; t <= peak.day; ++t) {
    if (series.values[t] >= threshold) {
      if (t == 0) return std::nullopt;
      return t;
    }
  }
  return peak.day;  // unreachable: the peak itself meets the threshold
}

std::optional<std::size_t> right_crossing(const SmoothedSeries& series, double alpha) {
  const Peak peak = find_peak(series);
  const double threshold = (1.0 - alpha) * peak.value;
  // Last day at or above the threshold; the tail after it is strictly below.
  std::size_t last = series.values.size() - 1;
  while (last > peak.day && !(series.values[last] >= threshold)) --last;
  if (last + 1 == series.values.size()) return std::nullopt;
  return last + 1;
}

std::string span_feature_name(const std::string& side, double alpha) {
  return side + std::to_string(std::lround(alpha * 100.0));
}

CurveFeatures extract_features(const SmoothedSeries& series, const FeatureOptions& options) {
  const Peak peak = find_peak(series);
  CurveFeatures f;
  f.peakdate = peak.day;
  f.peakvalue = peak.value;
  f.left.assign(options.span_alphas.size(), std::nullopt);
  f.right.assign(options.span_alphas.size(), std::nullopt);

  const std::size_t n = series.values.size();
  if (peak.day < options.boundary_margin || n - 1 - peak.day < options.boundary_margin) {
    f.boundary_peak = true;
    f.warnings.push_back("boundary peak for unit " + series.unit_id + " at day " +
                         std::to_string(peak.day) + " of " + std::to_string(n));
    return f;
  }

  const auto lo = left_crossing(series, options.center_alpha);
  const auto hi = right_crossing(series, options.center_alpha);
  if (!lo || !hi) {
    throw ComputationError("cannot center curve for unit " + series.unit_id + ": " +
                           (lo ? "right" : "left") + " crossing at level " +
                           std::to_string(options.center_alpha) + " is censored");
  }
  const auto t_lo = static_cast<std::int64_t>(*lo);
  const auto t_hi = static_cast<std::int64_t>(*hi);
  const std::int64_t t0 = (t_lo + t_hi) / 2;
  f.robust_peak = t0;
  f.curvature = t_hi - t_lo;
  f.peak = static_cast<std::int64_t>(peak.day) - t0;

  for (std::size_t i = 0; i < options.span_alphas.size(); ++i) {
    const double alpha = options.span_alphas[i];
    if (auto l = left_crossing(series, alpha)) f.left[i] = t0 - static_cast<std::int64_t>(*l);
    if (auto r = right_crossing(series, alpha)) f.right[i] = static_cast<std::int64_t>(*r) - t0;
  }
  return f;
}

std::vector<std::string> shape_feature_names(const FeatureOptions& options) {
  std::vector<std::string> names = {"peak", "peakvalue"};
  for (double a : options.span_alphas) names.push_back(span_feature_name("left", a));
  for (double a : options.span_alphas) names.push_back(span_feature_name("right", a));
  return names;
}

std::vector<std::string> feature_csv_columns(const FeatureOptions& options) {
  std::vector<std::string> names = {"peakdate", "peakvalue", "peak", "curvature"};
  for (double a : options.span_alphas) names.push_back(span_feature_name("left", a));
  for (double a : options.span_alphas) names.push_back(span_feature_name("right", a));
  return names;
}

}  // namespace epicurve
