#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epicurve/date.hpp"

namespace epicurve {

/// Daily case counts of one unit on a gap-free day axis.
struct RawSeries {
  std::string unit_id;
  Date start_date;
  std::vector<std::int64_t> counts;

  Date end_date() const { return start_date + std::chrono::days{static_cast<int>(counts.size()) - 1}; }
  friend bool operator==(const RawSeries&, const RawSeries&) = default;
};

enum class Region { North, South };
enum class Settlement { Urban, Suburban };

struct UnitMeta {
  std::string unit_id;
  std::string city_code;
  char district_letter = 'a';
  std::optional<int> age_group;  // 1: 0-19, 2: 20-34, 3: 35-54, 4: 55+
  std::int64_t population = 0;
  Region region = Region::North;
  Settlement status = Settlement::Urban;

  friend bool operator==(const UnitMeta&, const UnitMeta&) = default;
};

/// Daily infection rate (cases per `scale` persons per day).
struct RateSeries {
  std::string unit_id;
  Date start_date;
  std::vector<double> rates;

  Date end_date() const { return start_date + std::chrono::days{static_cast<int>(rates.size()) - 1}; }
  friend bool operator==(const RateSeries&, const RateSeries&) = default;
};

using CaseSeriesSet = std::map<std::string, RawSeries>;
using MetaRegistry = std::map<std::string, UnitMeta>;

inline constexpr double kDefaultRateScale = 100000.0;

struct StudyWindow {
  Date start = make_date(2022, 3, 25);
  Date end = make_date(2022, 8, 19);

  friend bool operator==(const StudyWindow&, const StudyWindow&) = default;
};

/// Reads `unit_id,date,count` rows. Rows may appear in any order; each unit's
/// dates must form a contiguous run. Throws DataError naming the row.
CaseSeriesSet parse_case_series(const std::filesystem::path& path);
CaseSeriesSet parse_case_series(std::istream& in, const std::string& source = "cases");
void write_case_series(std::ostream& out, const CaseSeriesSet& series);

/// Reads `unit_id,city_code,district_letter,age_group,population,region,status`.
MetaRegistry parse_unit_metadata(const std::filesystem::path& path);
MetaRegistry parse_unit_metadata(std::istream& in, const std::string& source = "metadata");
void write_unit_metadata(std::ostream& out, const MetaRegistry& registry);

std::string to_string(Region region);
std::string to_string(Settlement status);

RateSeries compute_daily_rates(const RawSeries& series, const UnitMeta& meta,
                               double scale = kDefaultRateScale);

/// Sub-series covering exactly [start, end].
RateSeries window_clip(const RateSeries& series, Date start, Date end);

}  // namespace epicurve
