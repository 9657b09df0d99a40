#include "epicurve/feature_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "epicurve/date.hpp"
#include "epicurve/errors.hpp"
#include "text.hpp"

namespace epicurve {

namespace {
constexpr std::string_view kDateColumn = "peakdate";
}

bool FeatureTable::has(std::string_view name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::size_t FeatureTable::index_of(std::string_view name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

void FeatureTable::add_column(std::string name, NumericColumn values) {
  if (has(name)) throw ConfigError("duplicate column '" + name + "'");
  if (values.size() != rows()) throw ComputationError("column '" + name + "' has wrong length");
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
  out << "unit_id";
  for (const auto& name : table.names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << table.unit_ids[r];
    for (std::size_t c = 0; c < table.names.size(); ++c) {
      out << ',';
      const auto& cell = table.columns[c][r];
      if (!cell) continue;
      if (table.names[c] == kDateColumn) {
        out << format_iso_date(Date{std::chrono::days{static_cast<int>(std::lround(*cell))}});
      } else {
        out << detail::format_double(*cell);
      }
    }
    out << '\n';
  }
}

FeatureTable read_feature_table(std::istream& in, const std::string& source) {
  std::string line;
  if (!detail::read_line(in, line)) throw DataError(source + ": empty file");
  detail::strip_bom(line);
  auto header = detail::split_csv(line);
  if (header.empty() || header[0] != "unit_id") throw DataError(source + ": first column must be unit_id");
  FeatureTable table;
  table.names.assign(header.begin() + 1, header.end());
  table.columns.resize(table.names.size());
  std::size_t row = 1;
  while (detail::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != header.size()) {
      throw DataError(source + " row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    table.unit_ids.push_back(fields[0]);
    for (std::size_t c = 0; c < table.names.size(); ++c) {
      const std::string& field = fields[c + 1];
      if (field.empty()) {
        table.columns[c].push_back(std::nullopt);
        continue;
      }
      if (table.names[c] == kDateColumn) {
        auto date = parse_iso_date(field);
        if (!date) throw DataError(source + " row " + std::to_string(row) + ": bad date '" + field + "'");
        table.columns[c].push_back(static_cast<double>(date->time_since_epoch().count()));
      } else {
        auto value = detail::parse_double(field);
        if (!value) throw DataError(source + " row " + std::to_string(row) + ": bad number '" + field + "'");
        table.columns[c].push_back(*value);
      }
    }
  }
  return table;
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_feature_table(in, path.filename().string());
}

}  // namespace epicurve
