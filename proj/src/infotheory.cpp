#include "epicurve/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "epicurve/errors.hpp"
#include "text.hpp"

namespace epicurve {

double percentile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ComputationError("percentile of empty data");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

CategoricalColumn apply_bins(std::span<const std::optional<double>> values, std::span<const double> edges) {
  CategoricalColumn out;
  out.reserve(values.size());
  for (const auto& v : values) {
    if (!v) {
      out.push_back(0);
      continue;
    }
    const auto above = std::upper_bound(edges.begin(), edges.end(), *v) - edges.begin();
    out.push_back(1 + static_cast<Category>(above));
  }
  return out;
}

Discretized discretize(std::span<const std::optional<double>> values, int n_bins) {
  if (values.empty()) throw ComputationError("cannot discretize an empty column");
  if (n_bins < 1) throw ConfigError("n_bins must be at least 1");
  std::vector<double> sorted;
  for (const auto& v : values)
    if (v) sorted.push_back(*v);
  std::sort(sorted.begin(), sorted.end());

  Discretized out;
  if (sorted.empty()) {
    out.categories.assign(values.size(), 0);
    out.warnings.push_back("degenerate column: every value is NA");
    return out;
  }

  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < static_cast<std::size_t>(n_bins)) {
    out.edges.assign(distinct.begin() + 1, distinct.end());
    out.warnings.push_back("only " + std::to_string(distinct.size()) +
                           " distinct values; using one bin per value");
  } else {
    for (int k = 1; k < n_bins; ++k) {
      out.edges.push_back(percentile_sorted(sorted, static_cast<double>(k) / n_bins));
    }
  }
  out.categories = apply_bins(values, out.edges);

  Category first = 0;
  bool single = true;
  for (Category c : out.categories) {
    if (c == 0) continue;
    if (first == 0) first = c;
    if (c != first) single = false;
  }
  if (single) out.warnings.push_back("degenerate column: a single category");
  return out;
}

bool CategoricalMatrix::has(std::string_view name) const {
  return std::find(feature_names.begin(), feature_names.end(), name) != feature_names.end();
}

const CategoricalColumn& CategoricalMatrix::column(std::string_view name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) throw ConfigError("unknown categorical column '" + std::string(name) + "'");
  return columns[static_cast<std::size_t>(it - feature_names.begin())];
}

CategoricalMatrix discretize_table(const FeatureTable& table, const std::vector<std::string>& names,
                                   int n_bins, std::vector<std::string>* warnings) {
  CategoricalMatrix m;
  m.unit_ids = table.unit_ids;
  for (const auto& name : names) {
    Discretized d = discretize(table.column(name), n_bins);
    if (warnings) {
      for (const auto& w : d.warnings) warnings->push_back(name + ": " + w);
    }
    m.feature_names.push_back(name);
    m.columns.push_back(std::move(d.categories));
    m.edges.push_back(std::move(d.edges));
  }
  return m;
}

void write_categorical_matrix(std::ostream& out, const CategoricalMatrix& m) {
  out << "unit_id";
  for (const auto& name : m.feature_names) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < m.unit_ids.size(); ++r) {
    out << m.unit_ids[r];
    for (const auto& col : m.columns) out << ',' << col[r];
    out << '\n';
  }
}

CategoricalMatrix read_categorical_matrix(std::istream& in, const std::string& source) {
  std::string line;
  if (!detail::read_line(in, line)) throw DataError(source + ": empty file");
  auto header = detail::split_csv(line);
  if (header.empty() || header[0] != "unit_id") throw DataError(source + ": first column must be unit_id");
  CategoricalMatrix m;
  m.feature_names.assign(header.begin() + 1, header.end());
  m.columns.resize(m.feature_names.size());
  m.edges.resize(m.feature_names.size());
  std::size_t row = 1;
  while (detail::read_line(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != header.size()) {
      throw DataError(source + " row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    m.unit_ids.push_back(fields[0]);
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
      auto v = detail::parse_int(fields[c + 1]);
      if (!v || *v < 0) throw DataError(source + " row " + std::to_string(row) + ": bad category");
      m.columns[c].push_back(static_cast<Category>(*v));
    }
  }
  return m;
}

void write_bin_edges(std::ostream& out, const CategoricalMatrix& m) {
  out << "feature,edges\n";
  for (std::size_t c = 0; c < m.feature_names.size(); ++c) {
    out << m.feature_names[c] << ',';
    for (std::size_t e = 0; e < m.edges[c].size(); ++e) {
      if (e) out << ';';
      out << detail::format_double(m.edges[c][e]);
    }
    out << '\n';
  }
}

ContingencyTable::ContingencyTable(std::vector<Category> row_labels, std::vector<Category> col_labels,
                                   std::vector<std::int64_t> counts)
    : row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)), counts_(std::move(counts)) {
  if (counts_.size() != row_labels_.size() * col_labels_.size()) {
    throw ComputationError("contingency table shape does not match its labels");
  }
  for (std::int64_t c : counts_) {
    if (c < 0) throw ComputationError("negative count in contingency table");
    total_ += c;
  }
  if (total_ < 1) throw ComputationError("contingency table has no observations");
}

std::vector<std::int64_t> ContingencyTable::row_sums() const {
  std::vector<std::int64_t> sums(rows(), 0);
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) sums[r] += at(r, c);
  return sums;
}

std::vector<std::int64_t> ContingencyTable::col_sums() const {
  std::vector<std::int64_t> sums(cols(), 0);
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) sums[c] += at(r, c);
  return sums;
}

ContingencyTable ContingencyTable::transposed() const {
  std::vector<std::int64_t> t(counts_.size());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) t[c * rows() + r] = at(r, c);
  return ContingencyTable(col_labels_, row_labels_, std::move(t));
}

namespace {

std::vector<Category> sorted_labels(std::span<const Category> values) {
  std::vector<Category> labels(values.begin(), values.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

std::size_t label_index(const std::vector<Category>& labels, Category v) {
  return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), v) - labels.begin());
}

}  // namespace

ContingencyTable contingency(std::span<const Category> x, std::span<const Category> y) {
  if (x.size() != y.size()) {
    throw ComputationError("length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.empty()) throw ComputationError("contingency of empty columns");
  auto rows = sorted_labels(x);
  auto cols = sorted_labels(y);
  std::vector<std::int64_t> counts(rows.size() * cols.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ++counts[label_index(rows, x[i]) * cols.size() + label_index(cols, y[i])];
  }
  return ContingencyTable(std::move(rows), std::move(cols), std::move(counts));
}

double entropy(std::span<const std::int64_t> counts) {
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  if (total <= 0) throw ComputationError("entropy of all-zero counts");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double conditional_entropy(const ContingencyTable& table, Conditioning direction) {
  if (direction == Conditioning::RowsGivenColumns) {
    return conditional_entropy(table.transposed(), Conditioning::ColumnsGivenRows);
  }
  const double n = static_cast<double>(table.total());
  double h = 0.0;
  const auto sums = table.row_sums();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (sums[r] == 0) continue;
    h += static_cast<double>(sums[r]) / n * entropy(table.row(r));
  }
  return h;
}

double rescaled_ce(const ContingencyTable& table, Conditioning direction) {
  const auto margin = direction == Conditioning::ColumnsGivenRows ? table.col_sums() : table.row_sums();
  const double h_target = entropy(margin);
  if (h_target <= 0.0) throw ComputationError("degenerate target: zero marginal entropy");
  return std::clamp(conditional_entropy(table, direction) / h_target, 0.0, 1.0);
}

double mutual_ce(const ContingencyTable& table) {
  return 0.5 * (rescaled_ce(table, Conditioning::ColumnsGivenRows) +
                rescaled_ce(table, Conditioning::RowsGivenColumns));
}

AssociationMatrices association_matrices(const CategoricalMatrix& m) {
  const std::size_t p = m.columns.size();
  if (p < 2) throw ComputationError("association analysis needs at least 2 feature columns");
  for (std::size_t i = 0; i < p; ++i) {
    const auto t = contingency(m.columns[i], m.columns[i]);
    if (entropy(t.row_sums()) <= 0.0) {
      throw ComputationError("degenerate column '" + m.feature_names[i] + "': zero entropy");
    }
  }
  AssociationMatrices a;
  a.names = m.feature_names;
  a.directed.assign(p, std::vector<double>(p, 0.0));
  a.mutual.assign(p, std::vector<double>(p, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const auto t = contingency(m.columns[i], m.columns[j]);
      a.directed[i][j] = rescaled_ce(t, Conditioning::ColumnsGivenRows);
      a.directed[j][i] = rescaled_ce(t, Conditioning::RowsGivenColumns);
      const double mean = 0.5 * (a.directed[i][j] + a.directed[j][i]);
      a.mutual[i][j] = mean;
      a.mutual[j][i] = mean;
    }
  }
  return a;
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& m) {
  out << "feature";
  for (const auto& name : names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << names[i];
    for (double v : m[i]) out << ',' << detail::format_fixed(v, 6);
    out << '\n';
  }
}

Network threshold_network(const AssociationMatrices& a, NetworkKind which, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("network threshold must lie in [0, 1]");
  Network net;
  net.kind = which;
  net.nodes = a.names;
  const Matrix& m = which == NetworkKind::Directed ? a.directed : a.mutual;
  const std::size_t p = a.names.size();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = which == NetworkKind::Directed ? 0 : i + 1; j < p; ++j) {
      if (i == j) continue;
      if (m[i][j] <= tau) net.edges.push_back({i, j, 1.0 - m[i][j]});
    }
  }
  return net;
}

std::string to_dot(const Network& network, std::string_view graph_name) {
  const bool directed = network.kind == NetworkKind::Directed;
  std::ostringstream out;
  out << (directed ? "digraph " : "graph ") << graph_name << " {\n";
  for (const auto& node : network.nodes) out << "  \"" << node << "\" [label=\"" << node << "\"];\n";
  for (const auto& e : network.edges) {
    out << "  \"" << network.nodes[e.from] << "\" " << (directed ? "->" : "--") << " \""
        << network.nodes[e.to] << "\" [weight=" << detail::format_fixed(e.weight, 6) << "];\n";
  }
  out << "}\n";
  return out.str();
}

OddsRatio odds_ratio(const ContingencyTable& table) {
  if (table.rows() != 2 || table.cols() != 2) throw ComputationError("odds ratio needs a 2x2 table");
  if (table.at(0, 0) == 0 || table.at(1, 0) == 0 || table.at(1, 1) == 0) {
    throw ComputationError("zero cell in a denominator position of the odds ratio");
  }
  OddsRatio r;
  r.odds_first = static_cast<double>(table.at(0, 1)) / static_cast<double>(table.at(0, 0));
  r.odds_second = static_cast<double>(table.at(1, 1)) / static_cast<double>(table.at(1, 0));
  r.ratio = r.odds_first / r.odds_second;
  return r;
}

}  // namespace epicurve
