#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace epicurve {

/// Calendar day on the study axis.
using Date = std::chrono::sys_days;

/// Parses a strict ISO-8601 `YYYY-MM-DD` date. Returns nullopt on any
/// malformed or out-of-range input.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(Date date);

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

}  // namespace epicurve
