#include "epicurve/major_factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "epicurve/errors.hpp"
#include "epicurve/rng.hpp"
#include "text.hpp"

namespace epicurve {

double conditional_entropy_given(std::span<const Category> y,
                                 std::span<const std::span<const Category>> features) {
  const std::size_t n = y.size();
  if (n == 0) throw ComputationError("empty response column");
  for (const auto& f : features) {
    if (f.size() != n) throw ComputationError("length mismatch between response and feature columns");
  }

  // Sort rows by (feature tuple, y); each run of equal tuples is one group.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto tuple_less = [&](std::size_t a, std::size_t b) {
    for (const auto& f : features) {
      if (f[a] != f[b]) return f[a] < f[b];
    }
    return false;
  };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (tuple_less(a, b)) return true;
    if (tuple_less(b, a)) return false;
    return y[a] < y[b];
  });

  // Canonical form: each group's y-counts sorted descending, groups sorted.
  // The sum then depends only on the multiset of groups, which makes the
  // result bitwise invariant under category relabeling.
  std::vector<std::vector<std::int64_t>> groups;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::vector<std::int64_t> counts;
    while (j < n && !tuple_less(idx[i], idx[j])) {
      std::size_t k = j;
      while (k < n && !tuple_less(idx[i], idx[k]) && y[idx[k]] == y[idx[j]]) ++k;
      counts.push_back(static_cast<std::int64_t>(k - j));
      j = k;
    }
    std::sort(counts.begin(), counts.end(), std::greater<>());
    groups.push_back(std::move(counts));
    i = j;
  }
  std::sort(groups.begin(), groups.end());

  double h = 0.0;
  const double total = static_cast<double>(n);
  for (const auto& g : groups) {
    const auto size = std::accumulate(g.begin(), g.end(), std::int64_t{0});
    h += static_cast<double>(size) / total * entropy(g);
  }
  return h;
}

JointCE joint_conditional_entropy(std::span<const Category> y,
                                  std::span<const std::span<const Category>> features) {
  const double hy = conditional_entropy_given(y, {});
  if (hy <= 0.0) throw ComputationError("degenerate response: zero entropy");
  JointCE out;
  out.bits = conditional_entropy_given(y, features);
  out.rescaled = out.bits / hy;
  return out;
}

NullDropStats noise_threshold(std::span<const Category> y,
                              std::span<const std::span<const Category>> existing,
                              std::span<const Category> candidate, int replicates, std::uint64_t seed) {
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (candidate.size() != y.size()) throw ComputationError("length mismatch between response and candidate");
  const double base = conditional_entropy_given(y, existing);

  std::vector<std::span<const Category>> cols(existing.begin(), existing.end());
  CategoricalColumn shuffled(candidate.begin(), candidate.end());
  cols.push_back(shuffled);

  std::vector<double> drops;
  drops.reserve(static_cast<std::size_t>(replicates));
  for (int r = 0; r < replicates; ++r) {
    std::copy(candidate.begin(), candidate.end(), shuffled.begin());
    Rng rng(seed, static_cast<std::uint64_t>(r));
    shuffle(std::span<Category>(shuffled), rng);
    drops.push_back(base - conditional_entropy_given(y, cols));
  }

  NullDropStats stats;
  stats.replicates = replicates;
  stats.seed = seed;
  stats.mean = std::accumulate(drops.begin(), drops.end(), 0.0) / replicates;
  if (replicates > 1) {
    double ss = 0.0;
    for (double d : drops) ss += (d - stats.mean) * (d - stats.mean);
    stats.sd = std::sqrt(ss / (replicates - 1));
  }
  std::sort(drops.begin(), drops.end());
  stats.q95 = percentile_sorted(drops, 0.95);
  return stats;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Order1: return "order1";
    case Classification::Order1Pair: return "order1-pair";
    case Classification::Order2Interaction: return "order2-interaction";
    case Classification::Redundant: return "redundant";
    case Classification::Insignificant: return "insignificant";
  }
  return "insignificant";
}

Classification classification_from_string(std::string_view text) {
  for (auto c : {Classification::Order1, Classification::Order1Pair, Classification::Order2Interaction,
                 Classification::Redundant, Classification::Insignificant}) {
    if (to_string(c) == text) return c;
  }
  throw DataError("unknown classification '" + std::string(text) + "'");
}

std::string FeatureSetResult::label() const { return detail::join(features, "_"); }

namespace {

// Shared rule for sets of size >= 2. `incremental[i]` is the drop gained by
// adding member i to the rest of the set; `subset_sce[i]` the SCE-drop of the
// set without member i.
Classification classify_set(const FeatureSetResult& set, const std::vector<double>& incremental,
                            const std::vector<double>& subset_sce,
                            const std::vector<const FeatureSetResult*>& singles,
                            const std::vector<const NullDropStats*>& nulls) {
  const std::size_t weakest = static_cast<std::size_t>(
      std::min_element(incremental.begin(), incremental.end()) - incremental.begin());
  const double noise = nulls[weakest]->q95;
  const double rival = *std::min_element(subset_sce.begin(), subset_sce.end());

  if (set.sce_drop > rival + kEntropyTolerance && set.sce_drop > noise + kEntropyTolerance) {
    return Classification::Order2Interaction;
  }
  if (set.sce_drop <= noise + kEntropyTolerance) return Classification::Redundant;

  bool all_significant = true;
  double additive = 0.0;
  for (std::size_t i = 0; i < singles.size(); ++i) {
    all_significant = all_significant && singles[i]->ce_drop > nulls[i]->q95 + kEntropyTolerance;
    additive += singles[i]->ce_drop;
  }
  if (all_significant && set.ce_drop <= additive + kEntropyTolerance) return Classification::Order1Pair;
  return Classification::Insignificant;
}

}  // namespace

Classification classify_pair(const FeatureSetResult& pair, const FeatureSetResult& first,
                             const FeatureSetResult& second, const NullDropStats& null_first,
                             const NullDropStats& null_second) {
  const std::vector<double> incremental = {second.ce - pair.ce, first.ce - pair.ce};
  const std::vector<double> subset_sce = {second.sce_drop, first.sce_drop};
  return classify_set(pair, incremental, subset_sce, {&first, &second}, {&null_first, &null_second});
}

FactorScanner::FactorScanner(NamedColumn response, std::vector<NamedColumn> candidates, ScanOptions options)
    : response_(std::move(response)), candidates_(std::move(candidates)), options_(options) {
  std::sort(candidates_.begin(), candidates_.end(),
            [](const NamedColumn& a, const NamedColumn& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (candidates_[i].values.size() != response_.values.size()) {
      throw ComputationError("candidate '" + candidates_[i].name + "' length differs from response '" +
                             response_.name + "'");
    }
    if (i > 0 && candidates_[i].name == candidates_[i - 1].name) {
      throw ConfigError("duplicate candidate '" + candidates_[i].name + "'");
    }
  }
  response_entropy_ = conditional_entropy_given(response_.values, {});
  if (response_entropy_ <= 0.0) {
    throw ComputationError("degenerate response '" + response_.name + "': zero entropy");
  }
}

const NamedColumn& FactorScanner::candidate(const std::string& name) const {
  auto it = std::lower_bound(candidates_.begin(), candidates_.end(), name,
                             [](const NamedColumn& c, const std::string& n) { return c.name < n; });
  if (it == candidates_.end() || it->name != name) throw ConfigError("unknown candidate '" + name + "'");
  return *it;
}

std::uint64_t FactorScanner::seed_for(const std::string& name) const {
  return options_.seed ^ stable_hash(name);
}

double FactorScanner::ce(const std::vector<std::string>& names) {
  std::vector<std::string> key = names;
  std::sort(key.begin(), key.end());
  if (auto it = ce_cache_.find(key); it != ce_cache_.end()) return it->second;
  std::vector<std::span<const Category>> cols;
  for (const auto& n : key) cols.emplace_back(candidate(n).values);
  const double h = conditional_entropy_given(response_.values, cols);
  ce_cache_.emplace(std::move(key), h);
  return h;
}

const NullDropStats& FactorScanner::singleton_null(const std::string& name) {
  if (auto it = null_cache_.find(name); it != null_cache_.end()) return it->second;
  NullDropStats stats;
  if (options_.noise) {
    stats = noise_threshold(response_.values, {}, candidate(name).values, options_.replicates, seed_for(name));
  }
  return null_cache_.emplace(name, stats).first->second;
}

FeatureSetResult FactorScanner::evaluate(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  if (names.empty()) throw ComputationError("empty feature set");
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw ConfigError("feature set repeats a member");
  }
  if (auto it = result_cache_.find(names); it != result_cache_.end()) return it->second;

  FeatureSetResult r;
  r.features = names;
  r.ce = ce(names);
  r.rescaled_ce = r.ce / response_entropy_;
  r.ce_drop = response_entropy_ - r.ce;

  if (names.size() == 1) {
    r.sce_drop = r.ce_drop;
    const NullDropStats& null = singleton_null(names[0]);
    if (options_.noise) r.null = null;
    r.significant = r.ce_drop > null.q95 + kEntropyTolerance;
    r.classification = r.significant ? Classification::Order1 : Classification::Insignificant;
  } else {
    std::vector<double> incremental;
    std::vector<double> subset_sce;
    std::vector<FeatureSetResult> singles;
    std::vector<const NullDropStats*> nulls;
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::vector<std::string> rest = names;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      incremental.push_back(ce(rest) - r.ce);
      subset_sce.push_back(evaluate(rest).sce_drop);
      singles.push_back(evaluate({names[i]}));
      nulls.push_back(&singleton_null(names[i]));
    }
    r.sce_drop = *std::min_element(incremental.begin(), incremental.end());
    const std::size_t weakest = static_cast<std::size_t>(
        std::min_element(incremental.begin(), incremental.end()) - incremental.begin());
    if (options_.noise) r.null = *nulls[weakest];
    r.significant = r.sce_drop > nulls[weakest]->q95 + kEntropyTolerance;
    std::vector<const FeatureSetResult*> single_ptrs;
    for (const auto& s : singles) single_ptrs.push_back(&s);
    r.classification = classify_set(r, incremental, subset_sce, single_ptrs, nulls);
  }
  result_cache_.emplace(names, r);
  return r;
}

std::vector<FeatureSetResult> FactorScanner::scan(int order) {
  if (order < 1 || order > kMaxScanOrder) {
    throw ConfigError("scan order must be between 1 and " + std::to_string(kMaxScanOrder));
  }
  if (candidates_.size() < static_cast<std::size_t>(order)) {
    throw ComputationError("order-" + std::to_string(order) + " scan needs at least " +
                           std::to_string(order) + " candidates");
  }
  std::vector<FeatureSetResult> results;
  const std::size_t p = candidates_.size();
  std::vector<std::size_t> pick(static_cast<std::size_t>(order));
  std::iota(pick.begin(), pick.end(), 0);
  while (true) {
    std::vector<std::string> names;
    for (std::size_t i : pick) names.push_back(candidates_[i].name);
    results.push_back(evaluate(std::move(names)));
    // Next combination in lexicographic order.
    std::size_t k = pick.size();
    while (k > 0 && pick[k - 1] == p - pick.size() + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
  }
  std::sort(results.begin(), results.end(), [](const FeatureSetResult& a, const FeatureSetResult& b) {
    if (a.ce != b.ce) return a.ce < b.ce;
    return a.label() < b.label();
  });
  return results;
}

std::vector<FeatureSetResult> scan_order1(const NamedColumn& response, const std::vector<NamedColumn>& candidates,
                                          const ScanOptions& options) {
  return FactorScanner(response, candidates, options).scan(1);
}

std::vector<FeatureSetResult> scan_order2(const NamedColumn& response, const std::vector<NamedColumn>& candidates,
                                          const ScanOptions& options) {
  return FactorScanner(response, candidates, options).scan(2);
}

void write_scan_csv(std::ostream& out, const std::vector<FeatureSetResult>& results) {
  out << "features,ce,rescaled_ce,ce_drop,sce_drop,null_mean,null_q95,significant,classification\n";
  for (const auto& r : results) {
    out << r.label() << ',' << detail::format_double(r.ce) << ',' << detail::format_double(r.rescaled_ce) << ','
        << detail::format_double(r.ce_drop) << ',' << detail::format_double(r.sce_drop) << ',';
    if (r.null) out << detail::format_double(r.null->mean);
    out << ',';
    if (r.null) out << detail::format_double(r.null->q95);
    out << ',' << (r.significant ? "true" : "false") << ',' << to_string(r.classification) << '\n';
  }
}

std::vector<FeatureSetResult> read_scan_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!detail::read_line(in, line) ||
      line != "features,ce,rescaled_ce,ce_drop,sce_drop,null_mean,null_q95,significant,classification") {
    throw DataError(source + ": not a scan file");
  }
  std::vector<FeatureSetResult> out;
  std::size_t row = 1;
  auto number = [&](const std::string& s) {
    auto v = detail::parse_double(s);
    if (!v) throw DataError(source + " row " + std::to_string(row) + ": bad number '" + s + "'");
    return *v;
  };
  while (detail::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto f = detail::split_csv(line);
    if (f.size() != 9) throw DataError(source + " row " + std::to_string(row) + ": expected 9 fields");
    FeatureSetResult r;
    std::string name;
    std::istringstream names(f[0]);
    while (std::getline(names, name, '_')) r.features.push_back(name);
    r.ce = number(f[1]);
    r.rescaled_ce = number(f[2]);
    r.ce_drop = number(f[3]);
    r.sce_drop = number(f[4]);
    if (!f[5].empty() || !f[6].empty()) {
      NullDropStats null;
      null.mean = number(f[5]);
      null.q95 = number(f[6]);
      r.null = null;
    }
    r.significant = f[7] == "true";
    r.classification = classification_from_string(f[8]);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::vector<const FeatureSetResult*> select_rows(const std::vector<FeatureSetResult>& results, int top_k,
                                                 int bottom_k, const std::string& what,
                                                 std::vector<std::string>& warnings) {
  std::vector<const FeatureSetResult*> rows;
  const auto n = results.size();
  const auto wanted = static_cast<std::size_t>(top_k) + static_cast<std::size_t>(bottom_k);
  if (wanted >= n) {
    if (wanted > n) {
      warnings.push_back(what + ": top " + std::to_string(top_k) + " + bottom " + std::to_string(bottom_k) +
                         " exceeds " + std::to_string(n) + " rows; showing all");
    }
    for (const auto& r : results) rows.push_back(&r);
    return rows;
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(top_k); ++i) rows.push_back(&results[i]);
  for (std::size_t i = n - static_cast<std::size_t>(bottom_k); i < n; ++i) rows.push_back(&results[i]);
  return rows;
}

void add_cells(std::vector<std::string>& row, const FeatureSetResult* r) {
  if (!r) {
    row.insert(row.end(), 3, "");
    return;
  }
  const double hy = r->response_entropy();
  row.push_back(r->label());
  row.push_back(detail::format_fixed(r->rescaled_ce, 4));
  row.push_back(detail::format_fixed(hy > 0.0 ? r->sce_drop / hy : 0.0, 4));
}

}  // namespace

FactorReport factor_report(const std::vector<FeatureSetResult>& order1,
                           const std::vector<FeatureSetResult>& order2, int top_k, int bottom_k,
                           ReportFormat format, std::string_view title) {
  if (top_k < 0 || bottom_k < 0) throw ConfigError("top and bottom counts must be non-negative");
  if (order1.empty() && order2.empty()) throw ComputationError("factor report needs at least one scan result");
  FactorReport report;
  const auto rows1 = select_rows(order1, top_k, bottom_k, "1-feature scan", report.warnings);
  const auto rows2 = select_rows(order2, top_k, bottom_k, "2-feature scan", report.warnings);

  std::vector<std::vector<std::string>> table;
  table.push_back({"1-feature", "CE", "SCE-drop", "2-feature", "CE", "SCE-drop"});
  for (std::size_t i = 0; i < std::max(rows1.size(), rows2.size()); ++i) {
    std::vector<std::string> row;
    add_cells(row, i < rows1.size() ? rows1[i] : nullptr);
    add_cells(row, i < rows2.size() ? rows2[i] : nullptr);
    table.push_back(std::move(row));
  }

  std::ostringstream out;
  if (format == ReportFormat::Markdown) {
    if (!title.empty()) out << "### " << title << "\n\n";
    for (std::size_t r = 0; r < table.size(); ++r) {
      out << '|';
      for (const auto& cell : table[r]) out << ' ' << cell << " |";
      out << '\n';
      if (r == 0) out << "|---|---:|---:|---|---:|---:|\n";
    }
  } else {
    if (!title.empty()) out << title << "\n\n";
    std::vector<std::size_t> width(6, 0);
    for (const auto& row : table)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    auto emit = [&](const std::vector<std::string>& row) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) line += "  ";
        line += row[c];
        line.append(width[c] - row[c].size(), ' ');
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out << line << '\n';
    };
    emit(table[0]);
    std::size_t total = 0;
    for (std::size_t w : width) total += w;
    out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    for (std::size_t r = 1; r < table.size(); ++r) emit(table[r]);
  }
  report.body = out.str();
  return report;
}

}  // namespace epicurve
