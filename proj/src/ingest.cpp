#include "epicurve/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "epicurve/errors.hpp"
#include "text.hpp"

namespace epicurve {

namespace {

constexpr const char* kCaseHeader = "unit_id,date,count";
constexpr const char* kMetaHeader = "unit_id,city_code,district_letter,age_group,population,region,status";

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

[[noreturn]] void row_error(const std::string& source, std::size_t row, const std::string& what) {
  throw DataError(source + " row " + std::to_string(row) + ": " + what);
}

void expect_header(std::istream& in, const std::string& source, const char* header) {
  std::string line;
  if (!detail::read_line(in, line)) throw DataError(source + ": empty file");
  detail::strip_bom(line);
  if (line != header) throw DataError(source + ": expected header '" + header + "', got '" + line + "'");
}

struct CaseRow {
  Date date;
  std::int64_t count;
  std::size_t row;
};

}  // namespace

CaseSeriesSet parse_case_series(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_case_series(in, path.filename().string());
}

CaseSeriesSet parse_case_series(std::istream& in, const std::string& source) {
  expect_header(in, source, kCaseHeader);
  std::map<std::string, std::vector<CaseRow>> rows;
  std::string line;
  std::size_t row = 1;
  while (detail::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != 3) row_error(source, row, "expected 3 fields, got " + std::to_string(fields.size()));
    if (fields[0].empty()) row_error(source, row, "empty unit_id");
    auto date = parse_iso_date(fields[1]);
    if (!date) row_error(source, row, "unparseable date '" + fields[1] + "'");
    auto count = detail::parse_int(fields[2]);
    if (!count) row_error(source, row, "unparseable count '" + fields[2] + "'");
    if (*count < 0) row_error(source, row, "negative count");
    rows[fields[0]].push_back({*date, *count, row});
  }

  CaseSeriesSet out;
  for (auto& [unit, unit_rows] : rows) {
    std::stable_sort(unit_rows.begin(), unit_rows.end(),
                     [](const CaseRow& a, const CaseRow& b) { return a.date < b.date; });
    RawSeries series{unit, unit_rows.front().date, {}};
    series.counts.reserve(unit_rows.size());
    for (std::size_t i = 0; i < unit_rows.size(); ++i) {
      if (i > 0) {
        const auto step = (unit_rows[i].date - unit_rows[i - 1].date).count();
        if (step == 0) {
          row_error(source, std::max(unit_rows[i].row, unit_rows[i - 1].row),
                    "duplicate row for unit " + unit + " on " + format_iso_date(unit_rows[i].date));
        }
        if (step > 1) {
          row_error(source, unit_rows[i].row,
                    "gap in day axis for unit " + unit + " between " +
                        format_iso_date(unit_rows[i - 1].date) + " and " +
                        format_iso_date(unit_rows[i].date));
        }
      }
      series.counts.push_back(unit_rows[i].count);
    }
    out.emplace(unit, std::move(series));
  }
  return out;
}

void write_case_series(std::ostream& out, const CaseSeriesSet& series) {
  out << kCaseHeader << '\n';
  for (const auto& [unit, s] : series) {
    for (std::size_t t = 0; t < s.counts.size(); ++t) {
      out << unit << ',' << format_iso_date(s.start_date + std::chrono::days{static_cast<int>(t)}) << ','
          << s.counts[t] << '\n';
    }
  }
}

std::string to_string(Region region) { return region == Region::North ? "North" : "South"; }
std::string to_string(Settlement status) { return status == Settlement::Urban ? "Urban" : "Suburban"; }

MetaRegistry parse_unit_metadata(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_unit_metadata(in, path.filename().string());
}

MetaRegistry parse_unit_metadata(std::istream& in, const std::string& source) {
  expect_header(in, source, kMetaHeader);
  MetaRegistry out;
  std::string line;
  std::size_t row = 1;
  while (detail::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = detail::split_csv(line);
    if (f.size() != 7) row_error(source, row, "expected 7 fields, got " + std::to_string(f.size()));
    UnitMeta meta;
    meta.unit_id = f[0];
    if (meta.unit_id.empty()) row_error(source, row, "empty unit_id");
    meta.city_code = f[1];
    if (meta.city_code.size() != 2) row_error(source, row, "city_code must have 2 letters");
    if (f[2].size() != 1 || f[2][0] < 'a' || f[2][0] > 'l') {
      row_error(source, row, "district_letter must be a letter a-l");
    }
    meta.district_letter = f[2][0];
    if (!f[3].empty()) {
      auto age = detail::parse_int(f[3]);
      if (!age || *age < 1 || *age > 4) row_error(source, row, "age_group must be 1-4 or empty");
      meta.age_group = static_cast<int>(*age);
    }
    auto population = detail::parse_int(f[4]);
    if (!population) row_error(source, row, "unparseable population '" + f[4] + "'");
    if (*population <= 0) row_error(source, row, "population must be positive");
    meta.population = *population;
    if (f[5] == "North") {
      meta.region = Region::North;
    } else if (f[5] == "South") {
      meta.region = Region::South;
    } else {
      row_error(source, row, "region must be North or South, got '" + f[5] + "'");
    }
    if (f[6] == "Urban") {
      meta.status = Settlement::Urban;
    } else if (f[6] == "Suburban") {
      meta.status = Settlement::Suburban;
    } else {
      row_error(source, row, "status must be Urban or Suburban, got '" + f[6] + "'");
    }
    if (out.count(meta.unit_id)) row_error(source, row, "duplicate unit " + meta.unit_id);
    out.emplace(meta.unit_id, std::move(meta));
  }
  return out;
}

void write_unit_metadata(std::ostream& out, const MetaRegistry& registry) {
  out << kMetaHeader << '\n';
  for (const auto& [unit, m] : registry) {
    out << unit << ',' << m.city_code << ',' << m.district_letter << ',';
    if (m.age_group) out << *m.age_group;
    out << ',' << m.population << ',' << to_string(m.region) << ',' << to_string(m.status) << '\n';
  }
}

RateSeries compute_daily_rates(const RawSeries& series, const UnitMeta& meta, double scale) {
  if (series.unit_id != meta.unit_id) {
    throw DataError("unit_id mismatch: series " + series.unit_id + " vs metadata " + meta.unit_id);
  }
  if (meta.population <= 0) throw DataError("population must be positive for unit " + meta.unit_id);
  RateSeries out{series.unit_id, series.start_date, {}};
  out.rates.reserve(series.counts.size());
  const double population = static_cast<double>(meta.population);
  for (std::int64_t c : series.counts) out.rates.push_back(static_cast<double>(c) * scale / population);
  return out;
}

RateSeries window_clip(const RateSeries& series, Date start, Date end) {
  if (end < start) throw DataError("window start after end");
  if (series.rates.empty() || start < series.start_date || end > series.end_date()) {
    throw DataError("window outside data for unit " + series.unit_id + ": [" + format_iso_date(start) +
                    ", " + format_iso_date(end) + "]");
  }
  const auto offset = (start - series.start_date).count();
  const auto length = (end - start).count() + 1;
  RateSeries out{series.unit_id, start, {}};
  out.rates.assign(series.rates.begin() + offset, series.rates.begin() + offset + length);
  return out;
}

}  // namespace epicurve
