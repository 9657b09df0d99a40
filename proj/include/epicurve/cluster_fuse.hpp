#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "epicurve/feature_table.hpp"
#include "epicurve/infotheory.hpp"

namespace epicurve {

using Point = std::vector<double>;

struct KMeansOptions {
  int k = 4;
  std::uint64_t seed = 0;
  int restarts = 100;
  int max_iterations = 300;
  bool standardize = true;
};

struct KMeansResult {
  std::vector<std::size_t> assignment;  // 0-based cluster per point
  std::vector<Point> centroids;  // in input units
  double wcss = 0.0;             // in standardized units when standardizing
  int restart = 0;
  int iterations = 0;
};

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` by WCSS (ties to
/// the lowest restart index). Restart r draws from the stream (seed, r).
/// Clusters are renumbered by first occurrence. With `standardize`, columns
/// are centred and scaled to unit variance before clustering.
KMeansResult kmeans(const std::vector<Point>& points, const KMeansOptions& options);

struct FusedFeature {
  std::string name;
  std::vector<std::string> source_columns;
  int k = 0;
  CategoricalColumn labels;        // 1..k, 0 for rows with any NA source
  std::vector<Point> centroids;    // in source-column units
  std::vector<double> means;       // standardization applied before clustering
  std::vector<double> scales;
  std::uint64_t seed = 0;
  double wcss = 0.0;               // in standardized units
};

/// Throws ComputationError when fewer than k rows are complete.
FusedFeature kmeans_fuse(const FeatureTable& table, const std::string& name,
                         const std::vector<std::string>& columns, const KMeansOptions& options = {});

void write_centroids_csv(std::ostream& out, const FusedFeature& fused);

struct Merge {
  std::size_t left = 0;   // node id; leaves are 0..n-1, merge i creates node n+i
  std::size_t right = 0;
  double height = 0.0;
};

struct HCTree {
  std::vector<std::string> leaves;
  std::vector<std::string> excluded;  // rows dropped for NA
  std::vector<Merge> merges;
  bool monotone = true;  // merge heights non-decreasing

  std::size_t leaf_count() const { return leaves.size(); }
  std::size_t root() const { return 2 * leaves.size() - 2; }
};

/// Ward.D2 agglomeration on Euclidean distances. The left child of every
/// merge is the one holding the smaller original leaf index; ties between
/// equal distances go to the pair with the smallest (min leaf, min leaf).
HCTree ward_linkage(const std::vector<Point>& points, std::vector<std::string> leaves);

/// Clusters the complete rows of `columns`; rows with NA are excluded.
HCTree hcluster_ward(const FeatureTable& table, const std::vector<std::string>& columns,
                     bool standardize = false);

/// `node_id,left_child,right_child,height`
void write_tree(std::ostream& out, const HCTree& tree);

struct LeafCodes {
  std::vector<std::string> codes;              // per leaf index, root-to-leaf bits
  std::vector<std::size_t> order;              // leaves in left-first traversal order
  std::vector<std::vector<int>> similarity;    // common-prefix lengths, by leaf index
};

LeafCodes leaf_codes(const HCTree& tree);

/// `leaf,unit_id,code` rows in traversal order.
void write_codes_csv(std::ostream& out, const HCTree& tree, const LeafCodes& codes);

struct Heatmap {
  std::vector<std::string> labels;  // traversal order
  std::string csv;
  std::string svg;
};

Heatmap similarity_heatmap(const LeafCodes& codes, const HCTree& tree);

}  // namespace epicurve
