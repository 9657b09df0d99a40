// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "epicurve/cluster_fuse.hpp"
#include "epicurve/curve_features.hpp"
#include "epicurve/infotheory.hpp"
#include "epicurve/major_factor.hpp"
#include "epicurve/pipeline.hpp"
#include "epicurve/rng.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace epicurve;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const std::string& id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_seconds;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.3f s (limit %.0f s)", secs, limit_seconds);
  std::cout << id << ' ' << (ok ? "PASS" : "FAIL") << "  " << title << "  [" << o.detail << "; " << timing
            << (in_time ? "" : ", too slow") << "]" << std::endl;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome ac1() {
  // cell counts in thousands; the ratio is scale free
  const auto r = odds_ratio(ContingencyTable({1, 0}, {0, 1}, {3142, 1573, 14741, 3735}));
  const bool ok = std::abs(r.odds_first - 0.5008) <= 0.01 && std::abs(r.odds_second - 0.2534) <= 0.01 &&
                  std::abs(r.ratio - 1.9765) <= 0.01;
  return {ok, fmt("odds %.4f", r.odds_first) + fmt(", %.4f", r.odds_second) + fmt(", ratio %.4f", r.ratio)};
}

Outcome ac2() {
  Rng rng(2022, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(60);
    for (auto& v : x) v = 500.0 * rng.uniform();
    const auto got = smooth(RateSeries{"u", make_date(2022, 1, 1), x}).values;
    const auto want = oracle::double_moving_average7(x);
    if (got.size() != want.size()) return {false, "length mismatch"};
    for (std::size_t t = 0; t < got.size(); ++t) worst = std::max(worst, std::abs(got[t] - want[t]));
  }
  return {worst <= 1e-12, fmt("max abs diff %.3g", worst)};
}

Outcome ac3() {
  const SmoothedSeries s{"u", make_date(2022, 1, 1), oracle::piecewise_linear_curve()};
  const auto f = extract_features(s);
  const auto lo = left_crossing(s, 0.1);
  const auto hi = right_crossing(s, 0.1);
  const bool ok = f.peakdate == 100 && lo == std::optional<std::size_t>(90) &&
                  hi == std::optional<std::size_t>(121) && f.robust_peak == 105 && f.curvature == 31 &&
                  f.left[4] == 55 && f.right[4] == 96;
  std::ostringstream d;
  d << "t_max " << f.peakdate << ", crossings " << (lo ? std::to_string(*lo) : "NA") << "/"
    << (hi ? std::to_string(*hi) : "NA") << ", t0 " << f.robust_peak.value_or(-1) << ", curvature "
    << f.curvature.value_or(-1) << ", left50 " << f.left[4].value_or(-1) << ", right50 "
    << f.right[4].value_or(-1);
  return {ok, d.str()};
}

Outcome ac4() {
  Rng rng(2022, 4);
  double worst_chain = 0.0, worst_mi = 0.0;
  bool in_range = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + rng.below(5), c = 1 + rng.below(5);
    std::vector<Category> rl, cl;
    for (std::size_t i = 0; i < r; ++i) rl.push_back(static_cast<Category>(i));
    for (std::size_t j = 0; j < c; ++j) cl.push_back(static_cast<Category>(j));
    std::vector<std::int64_t> counts(r * c);
    for (auto& v : counts) v = static_cast<std::int64_t>(rng.below(30));
    counts[rng.below(counts.size())] += 1;
    const ContingencyTable t(rl, cl, counts);
    const double hxy = entropy(t.cells()), hx = entropy(t.row_sums()), hy = entropy(t.col_sums());
    const double hy_x = conditional_entropy(t, Conditioning::ColumnsGivenRows);
    const double hx_y = conditional_entropy(t, Conditioning::RowsGivenColumns);
    worst_chain = std::max({worst_chain, std::abs(hxy - hx - hy_x), std::abs(hxy - hy - hx_y)});
    worst_mi = std::max(worst_mi, std::abs((hx - hx_y) - (hy - hy_x)));
    if (hy > 0.0) {
      const double e = rescaled_ce(t, Conditioning::ColumnsGivenRows);
      in_range = in_range && e >= 0.0 && e <= 1.0;
    }
    if (hx > 0.0) {
      const double e = rescaled_ce(t, Conditioning::RowsGivenColumns);
      in_range = in_range && e >= 0.0 && e <= 1.0;
    }
  }
  return {worst_chain <= 1e-12 && worst_mi <= 1e-12 && in_range,
          fmt("chain rule %.3g", worst_chain) + fmt(", MI symmetry %.3g", worst_mi) +
              (in_range ? ", rescaled CE in [0,1]" : ", rescaled CE out of range")};
}

Outcome ac5() {
  NamedColumn y{"y", {}}, x1{"x1", {}}, x2{"x2", {}};
  for (int rep = 0; rep < 2; ++rep)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        x1.values.push_back(1 + a);
        x2.values.push_back(1 + b);
        y.values.push_back(1 + (a ^ b));
      }
  FactorScanner xor_scan(y, {x1, x2}, {200, 1, true});
  const auto s1 = xor_scan.evaluate({"x1"});
  const auto s2 = xor_scan.evaluate({"x2"});
  const auto pair = xor_scan.evaluate({"x1", "x2"});
  const auto xor_class =
      classify_pair(pair, s1, s2, xor_scan.singleton_null("x1"), xor_scan.singleton_null("x2"));

  NamedColumn py{"y", {}}, p1{"x1", {}}, p2{"x2", {}};
  for (int rep = 0; rep < 8; ++rep)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        p1.values.push_back(1 + a);
        p2.values.push_back(1 + b);
        py.values.push_back(1 + 2 * a + b);
      }
  FactorScanner add_scan(py, {p1, p2}, {200, 1, true});
  const auto a_pair = add_scan.evaluate({"x1", "x2"});
  const auto add_class = classify_pair(a_pair, add_scan.evaluate({"x1"}), add_scan.evaluate({"x2"}),
                                       add_scan.singleton_null("x1"), add_scan.singleton_null("x2"));

  const bool ok = std::abs(s1.ce_drop) <= 1e-12 && std::abs(s2.ce_drop) <= 1e-12 && pair.ce == 0.0 &&
                  std::abs(pair.sce_drop - 1.0) <= 1e-12 && xor_class == Classification::Order2Interaction &&
                  add_class == Classification::Order1Pair;
  return {ok, fmt("XOR drops %.3g", s1.ce_drop) + fmt("/%.3g", s2.ce_drop) + fmt(", pair CE %.3g", pair.ce) +
                  fmt(", SCE-drop %.3g", pair.sce_drop) + ", " + to_string(xor_class) + "; additive " +
                  to_string(add_class)};
}

Outcome ac6() {
  int exceed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(2022, 600 + static_cast<std::uint64_t>(trial));
    CategoricalColumn y(84), x(84);
    for (auto& v : y) v = 1 + static_cast<Category>(rng.below(4));
    for (auto& v : x) v = 1 + static_cast<Category>(rng.below(4));
    std::vector<std::span<const Category>> f = {x};
    const double drop = conditional_entropy_given(y, {}) - conditional_entropy_given(y, f);
    const auto null = noise_threshold(y, {}, x, 200, 7000 + static_cast<std::uint64_t>(trial));
    if (drop > null.q95 + kEntropyTolerance) ++exceed;
  }
  return {exceed <= 10, std::to_string(exceed) + "/100 trials above q95"};
}

Outcome ac7() {
  Rng rng(2022, 7);
  double worst = 0.0;
  int structure_mismatch = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(7), dim = 1 + rng.below(5);
    std::vector<Point> pts(n, Point(dim));
    for (auto& p : pts)
      for (auto& v : p) v = rng.normal();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    const auto got = ward_linkage(pts, names);
    const auto want = oracle::naive_ward(pts);
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (got.merges[i].left != want[i].left || got.merges[i].right != want[i].right) ++structure_mismatch;
      worst = std::max(worst, std::abs(got.merges[i].height - want[i].height));
    }
  }
  return {structure_mismatch == 0 && worst <= 1e-9,
          std::to_string(structure_mismatch) + " structural mismatches, max height diff " + fmt("%.3g", worst)};
}

Outcome ac8() {
  Rng rng(2022, 8);
  int mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    HCTree t;
    for (std::size_t i = 0; i < n; ++i) t.leaves.push_back(std::to_string(i));
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) active.push_back(i);
    std::vector<std::pair<std::size_t, std::size_t>> children;
    for (std::size_t step = 0; step + 1 < n; ++step) {
      const std::size_t i = rng.below(active.size());
      std::size_t j = rng.below(active.size() - 1);
      if (j >= i) ++j;
      t.merges.push_back({active[i], active[j], static_cast<double>(step)});
      children.emplace_back(active[i], active[j]);
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
      active.push_back(n + step);
    }
    const auto codes = leaf_codes(t);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        if (codes.similarity[u][v] != oracle::lca_depth(children, n, u, v)) ++mismatches;
  }
  return {mismatches == 0, std::to_string(mismatches) + " leaf pairs disagree"};
}

Outcome ac9() {
  const auto dir = testing_support::scratch_dir("acceptance_geography");
  const auto config = load_config(testing_support::write_synthetic_project(dir, 84, 0, 0));
  std::ostringstream log;
  run_pipeline(config, log);

  std::ifstream scan_in(config.output_dir / "scan_region_order1.csv");
  const auto scan = read_scan_csv(scan_in);
  const FeatureSetResult* fused = nullptr;
  for (const auto& r : scan)
    if (r.label() == "left30to70") fused = &r;
  if (!fused) return {false, "left30to70 missing from the region scan"};

  const auto meta = parse_unit_metadata(dir / "metadata.csv");
  std::ifstream codes_in(config.output_dir / "codes_left.csv");
  std::string line;
  std::getline(codes_in, line);
  int zero_north = 0, zero_south = 0, one_north = 0, one_south = 0, leaves = 0;
  while (std::getline(codes_in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto unit = line.substr(c1 + 1, c2 - c1 - 1);
    const bool north = meta.at(unit).region == Region::North;
    const bool left = line[c2 + 1] == '0';
    ++leaves;
    (left ? (north ? zero_north : zero_south) : (north ? one_north : one_south))++;
  }
  const int excluded = static_cast<int>(meta.size()) - leaves;
  const int misplaced = std::min(zero_south + one_north, zero_north + one_south) + excluded;
  const bool ok = fused->rescaled_ce < 0.5 && fused->significant && misplaced <= 8;
  return {ok, fmt("left30to70 rescaled CE %.4f", fused->rescaled_ce) +
                  (fused->significant ? " significant" : " not significant") + ", root split misplaces " +
                  std::to_string(misplaced) + " of " + std::to_string(meta.size())};
}

Outcome ac10() {
  std::vector<std::string> manifests;
  for (const char* run : {"acceptance_determinism_a", "acceptance_determinism_b"}) {
    const auto dir = testing_support::scratch_dir(run);
    const auto config = testing_support::write_synthetic_project(dir, 84, 0, 0);
    const std::string cmd = std::string("\"") + EPICURVE_CLI + "\" all --config \"" + config.string() + "\" > \"" +
                            (dir / "log.txt").string() + "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "epicurve all failed in " + dir.string()};
    manifests.push_back(testing_support::slurp(dir / "out" / "manifest.txt"));
  }
  const bool ok = !manifests[0].empty() && manifests[0] == manifests[1];
  std::size_t lines = 0;
  for (char c : manifests[0]) lines += c == '\n';
  return {ok, std::to_string(lines) + " manifest entries, " + (ok ? "identical" : "different")};
}

}  // namespace

int main() {
  run("AC1", "odds ratio from the insurance contingency table", 1, ac1);
  run("AC2", "triangular smoother equals two 7-day moving averages", 1, ac2);
  run("AC3", "crossing times on the piecewise-linear curve", 1, ac3);
  run("AC4", "entropy identities on 1000 random tables", 5, ac4);
  run("AC5", "XOR interaction and additive pair classification", 1, ac5);
  run("AC6", "permutation noise calibration", 30, ac6);
  run("AC7", "Ward.D2 against the naive Lance-Williams reference", 10, ac7);
  run("AC8", "leaf-code prefixes against LCA depth", 5, ac8);
  run("AC9", "synthetic geography end to end", 60, ac9);
  run("AC10", "byte-identical manifests from repeated runs", 60, ac10);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures;
}
