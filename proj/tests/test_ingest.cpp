#include <sstream>
#include <string>

#include "doctest.h"
#include "epicurve/errors.hpp"
#include "epicurve/ingest.hpp"
#include "epicurve/rng.hpp"

using namespace epicurve;

namespace {

CaseSeriesSet parse_cases(const std::string& text) {
  std::istringstream in(text);
  return parse_case_series(in);
}

MetaRegistry parse_meta(const std::string& text) {
  std::istringstream in(text);
  return parse_unit_metadata(in);
}

const char* kMetaHeader = "unit_id,city_code,district_letter,age_group,population,region,status\n";

}  // namespace

TEST_CASE("case series parse into a contiguous day axis") {
  auto set = parse_cases("unit_id,date,count\nA,2022-03-25,3\nA,2022-03-26,5\nA,2022-03-27,0\n");
  REQUIRE(set.size() == 1);
  const auto& a = set.at("A");
  CHECK(a.start_date == make_date(2022, 3, 25));
  CHECK(a.counts == std::vector<std::int64_t>{3, 5, 0});
  CHECK(a.end_date() == make_date(2022, 3, 27));
}

TEST_CASE("rows may arrive out of order") {
  auto set = parse_cases("unit_id,date,count\nB,2022-01-02,2\nA,2022-01-01,1\nB,2022-01-01,1\n");
  CHECK(set.at("B").counts == std::vector<std::int64_t>{1, 2});
  CHECK(set.at("A").counts == std::vector<std::int64_t>{1});
}

TEST_CASE("malformed case rows are rejected") {
  CHECK_THROWS_WITH_AS(parse_cases("unit_id,date,count\nA,2022-03-25,3\nA,2022-03-27,5\n"),
                       doctest::Contains("gap in day axis"), DataError);
  CHECK_THROWS_WITH_AS(parse_cases("unit_id,date,count\nA,2022-03-25,-1\n"), doctest::Contains("row 2: negative count"),
                       DataError);
  CHECK_THROWS_WITH_AS(parse_cases("unit_id,date,count\nA,2022-13-01,1\n"), doctest::Contains("unparseable date"),
                       DataError);
  CHECK_THROWS_WITH_AS(parse_cases("unit_id,date,count\nA,2022-03-25,1\nA,2022-03-25,2\n"),
                       doctest::Contains("duplicate row"), DataError);
  CHECK_THROWS_AS(parse_cases("unit,date,count\n"), DataError);
}

TEST_CASE("metadata parse with missing age group") {
  auto reg = parse_meta(std::string(kMetaHeader) + "TPa,TP,a,,2600000,North,Urban\n");
  const auto& m = reg.at("TPa");
  CHECK(m.city_code == "TP");
  CHECK(m.district_letter == 'a');
  CHECK_FALSE(m.age_group.has_value());
  CHECK(m.population == 2600000);
  CHECK(m.region == Region::North);
  CHECK(m.status == Settlement::Urban);
}

TEST_CASE("metadata errors") {
  CHECK_THROWS_WITH_AS(parse_meta(std::string(kMetaHeader) + "X,TP,a,1,10,North,Urban\nX,TP,a,1,10,North,Urban\n"),
                       doctest::Contains("duplicate unit"), DataError);
  CHECK_THROWS_AS(parse_meta(std::string(kMetaHeader) + "X,TP,a,1,10,East,Urban\n"), DataError);
}

TEST_CASE("daily rates") {
  UnitMeta meta;
  meta.unit_id = "A";
  meta.population = 100000;
  RawSeries s{"A", make_date(2022, 1, 1), {100}};
  CHECK(compute_daily_rates(s, meta).rates == std::vector<double>{100.0});

  meta.population = 200000;
  s.counts = {50};
  CHECK(compute_daily_rates(s, meta).rates == std::vector<double>{25.0});

  meta.population = 0;
  CHECK_THROWS_WITH_AS(compute_daily_rates(s, meta), doctest::Contains("population must be positive"), DataError);

  meta.population = 100;
  meta.unit_id = "B";
  CHECK_THROWS_WITH_AS(compute_daily_rates(s, meta), doctest::Contains("unit_id mismatch"), DataError);
}

TEST_CASE("rates are linear in counts") {
  Rng rng(11, 0);
  UnitMeta meta{"U", "C", 'a', 2, 123457, Region::South, Settlement::Suburban};
  for (int trial = 0; trial < 50; ++trial) {
    RawSeries s{"U", make_date(2022, 1, 1), {}};
    for (int t = 0; t < 30; ++t) s.counts.push_back(static_cast<std::int64_t>(rng.below(500)));
    RawSeries doubled = s;
    for (auto& c : doubled.counts) c *= 2;
    const auto r1 = compute_daily_rates(s, meta);
    const auto r2 = compute_daily_rates(doubled, meta);
    for (std::size_t t = 0; t < r1.rates.size(); ++t) CHECK(r2.rates[t] == doctest::Approx(2.0 * r1.rates[t]).epsilon(1e-15));
  }
}

TEST_CASE("window clipping") {
  RateSeries s{"A", make_date(2022, 3, 20), {}};
  for (int t = 0; t < 20; ++t) s.rates.push_back(t);

  auto c = window_clip(s, make_date(2022, 3, 22), make_date(2022, 3, 24));
  CHECK(c.start_date == make_date(2022, 3, 22));
  CHECK(c.rates == std::vector<double>{2, 3, 4});

  CHECK(window_clip(c, c.start_date, c.end_date()) == c);
  CHECK(window_clip(s, s.start_date, s.end_date()) == s);

  CHECK_THROWS_WITH_AS(window_clip(s, make_date(2022, 3, 19), make_date(2022, 3, 24)),
                       doctest::Contains("window outside data"), DataError);
  CHECK_THROWS_AS(window_clip(s, make_date(2022, 3, 30), make_date(2022, 4, 30)), DataError);
}

TEST_CASE("write/parse round trip") {
  Rng rng(5, 1);
  CaseSeriesSet set;
  MetaRegistry reg;
  for (int u = 0; u < 6; ++u) {
    std::string id = "U" + std::to_string(u);
    RawSeries s{id, make_date(2022, 1, 1) + std::chrono::days{static_cast<int>(rng.below(40))}, {}};
    const auto len = 1 + rng.below(30);
    for (std::size_t t = 0; t < len; ++t) s.counts.push_back(static_cast<std::int64_t>(rng.below(1000)));
    set.emplace(id, s);
    UnitMeta m{id, "C" + std::to_string(u), static_cast<char>('a' + u),
               u % 3 == 0 ? std::nullopt : std::optional<int>(1 + u % 4),
               1000 + static_cast<std::int64_t>(rng.below(100000)), u % 2 ? Region::South : Region::North,
               u % 2 ? Settlement::Urban : Settlement::Suburban};
    reg.emplace(id, m);
  }
  std::ostringstream cases, meta;
  write_case_series(cases, set);
  write_unit_metadata(meta, reg);
  CHECK(parse_cases(cases.str()) == set);
  CHECK(parse_meta(meta.str()) == reg);
}
