#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace epicurve {

using NumericColumn = std::vector<std::optional<double>>;

/// Units x named numeric columns with explicit NA. A column named "peakdate"
/// holds days since 1970-01-01 and is written as an ISO date.
struct FeatureTable {
  std::vector<std::string> unit_ids;
  std::vector<std::string> names;
  std::vector<NumericColumn> columns;

  std::size_t rows() const { return unit_ids.size(); }
  bool has(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;  // throws ConfigError
  const NumericColumn& column(std::string_view name) const { return columns[index_of(name)]; }
  void add_column(std::string name, NumericColumn values);

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;
};

/// CSV with header `unit_id,<names...>`; NA is an empty field. Reals are
/// written in shortest round-trip form so a write/read cycle is exact.
void write_feature_table(std::ostream& out, const FeatureTable& table);
FeatureTable read_feature_table(std::istream& in, const std::string& source = "features");
FeatureTable read_feature_table(const std::filesystem::path& path);

}  // namespace epicurve
