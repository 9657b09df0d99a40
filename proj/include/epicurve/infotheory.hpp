#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epicurve/feature_table.hpp"

namespace epicurve {

/// Category code; 0 is NA, observed values use 1..k.
using Category = int;
using CategoricalColumn = std::vector<Category>;
using Matrix = std::vector<std::vector<double>>;

struct Discretized {
  CategoricalColumn categories;
  /// Lower edges of bins 2..k; a value v falls in bin 1 + #{edges <= v}.
  std::vector<double> edges;
  std::vector<std::string> warnings;
};

/// Quantile binning with linear-interpolation percentiles and left-closed
/// bins. Columns with fewer than `n_bins` distinct values get one bin per
/// distinct value. Throws ComputationError on an empty column.
Discretized discretize(std::span<const std::optional<double>> values, int n_bins = 4);

/// Re-applies stored edges.
CategoricalColumn apply_bins(std::span<const std::optional<double>> values,
                             std::span<const double> edges);

/// Linear-interpolation percentile of sorted data, p in [0, 1].
double percentile_sorted(std::span<const double> sorted, double p);

struct CategoricalMatrix {
  std::vector<std::string> unit_ids;
  std::vector<std::string> feature_names;
  std::vector<CategoricalColumn> columns;
  std::vector<std::vector<double>> edges;  // per column; empty for native categorical columns

  bool has(std::string_view name) const;
  const CategoricalColumn& column(std::string_view name) const;
};

/// Discretizes the named columns of `table`; warnings are appended with the
/// column name prefixed.
CategoricalMatrix discretize_table(const FeatureTable& table, const std::vector<std::string>& names,
                                   int n_bins, std::vector<std::string>* warnings = nullptr);

void write_categorical_matrix(std::ostream& out, const CategoricalMatrix& m);
CategoricalMatrix read_categorical_matrix(std::istream& in, const std::string& source = "categories");
void write_bin_edges(std::ostream& out, const CategoricalMatrix& m);

class ContingencyTable {
 public:
  ContingencyTable(std::vector<Category> row_labels, std::vector<Category> col_labels,
                   std::vector<std::int64_t> counts);

  std::size_t rows() const { return row_labels_.size(); }
  std::size_t cols() const { return col_labels_.size(); }
  std::int64_t at(std::size_t r, std::size_t c) const { return counts_[r * cols() + c]; }
  std::int64_t total() const { return total_; }
  const std::vector<Category>& row_labels() const { return row_labels_; }
  const std::vector<Category>& col_labels() const { return col_labels_; }
  std::vector<std::int64_t> row_sums() const;
  std::vector<std::int64_t> col_sums() const;
  std::span<const std::int64_t> row(std::size_t r) const {
    return std::span<const std::int64_t>(counts_).subspan(r * cols(), cols());
  }
  std::span<const std::int64_t> cells() const { return counts_; }
  ContingencyTable transposed() const;

 private:
  std::vector<Category> row_labels_;
  std::vector<Category> col_labels_;
  std::vector<std::int64_t> counts_;
  std::int64_t total_ = 0;
};

/// Cross-tabulates x (rows) against y (columns). Labels are the sorted
/// distinct observed categories, NA included.
ContingencyTable contingency(std::span<const Category> x, std::span<const Category> y);

/// Shannon entropy in bits of the empirical distribution.
double entropy(std::span<const std::int64_t> counts);

enum class Conditioning {
  ColumnsGivenRows,  // H(col | row)
  RowsGivenColumns,  // H(row | col)
};

double conditional_entropy(const ContingencyTable& table, Conditioning direction);

/// Conditional entropy divided by the entropy of the conditioned (target)
/// margin, clamped to [0, 1]. Throws ComputationError("degenerate target").
double rescaled_ce(const ContingencyTable& table, Conditioning direction);

/// Mean of the two directional re-scaled conditional entropies.
double mutual_ce(const ContingencyTable& table);

struct AssociationMatrices {
  std::vector<std::string> names;
  Matrix directed;  // (i, j) = H(X_j | X_i) / H(X_j)
  Matrix mutual;    // symmetric mean of directed(i, j) and directed(j, i)
};

AssociationMatrices association_matrices(const CategoricalMatrix& m);

/// Square matrix CSV with feature-name headers, 6 decimal places.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& names, const Matrix& m);

enum class NetworkKind { Directed, Mutual };

struct NetworkEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 0.0;  // 1 - entry
};

struct Network {
  NetworkKind kind = NetworkKind::Directed;
  std::vector<std::string> nodes;
  std::vector<NetworkEdge> edges;
};

/// Keeps edge i -> j (or i -- j, i < j, for the mutual matrix) when
/// entry(i, j) <= tau.
Network threshold_network(const AssociationMatrices& a, NetworkKind which, double tau);

std::string to_dot(const Network& network, std::string_view graph_name = "associations");

struct OddsRatio {
  double odds_first = 0.0;
  double odds_second = 0.0;
  double ratio = 0.0;
};

/// odds_i = n[i][1] / n[i][0]; ratio = odds_first / odds_second.
OddsRatio odds_ratio(const ContingencyTable& table);

}  // namespace epicurve
