#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epicurve/infotheory.hpp"

namespace epicurve {

/// Absolute slack for comparing entropy quantities computed along different
/// summation paths.
inline constexpr double kEntropyTolerance = 1e-12;

/// Highest supported feature-set order; larger joint tables outgrow the data.
inline constexpr int kMaxScanOrder = 3;

struct NamedColumn {
  std::string name;
  CategoricalColumn values;
};

struct JointCE {
  double bits = 0.0;      // H(Y | F)
  double rescaled = 0.0;  // H(Y | F) / H(Y)
};

/// H(Y | F) where the conditioning rows are the observed tuples of F.
double conditional_entropy_given(std::span<const Category> y,
                                 std::span<const std::span<const Category>> features);

/// Throws ComputationError when H(Y) is zero.
JointCE joint_conditional_entropy(std::span<const Category> y,
                                  std::span<const std::span<const Category>> features);

struct NullDropStats {
  int replicates = 0;
  double mean = 0.0;
  double sd = 0.0;
  double q95 = 0.0;
  std::uint64_t seed = 0;
};

/// Permutation null of the drop H(Y|F) - H(Y|F + pi(X)). Replicate r shuffles
/// X with the stream (seed, r), so the result is independent of scheduling.
NullDropStats noise_threshold(std::span<const Category> y,
                              std::span<const std::span<const Category>> existing,
                              std::span<const Category> candidate, int replicates, std::uint64_t seed);

enum class Classification { Order1, Order1Pair, Order2Interaction, Redundant, Insignificant };

std::string to_string(Classification c);
Classification classification_from_string(std::string_view text);

struct FeatureSetResult {
  std::vector<std::string> features;  // sorted by name
  double ce = 0.0;                    // H(Y | F), bits
  double rescaled_ce = 0.0;           // H(Y | F) / H(Y)
  double ce_drop = 0.0;               // H(Y) - H(Y | F)
  double sce_drop = 0.0;              // min over members of H(Y | F - X) - H(Y | F)
  std::optional<NullDropStats> null;  // the weakest member's singleton null
  bool significant = false;
  Classification classification = Classification::Insignificant;

  std::string label() const;  // members joined by '_'
  double response_entropy() const { return ce + ce_drop; }
};

/// Classifies a pair from its own result, both singleton results, and the
/// members' singleton permutation nulls.
Classification classify_pair(const FeatureSetResult& pair, const FeatureSetResult& first,
                             const FeatureSetResult& second, const NullDropStats& null_first,
                             const NullDropStats& null_second);

struct ScanOptions {
  int replicates = 200;
  std::uint64_t seed = 0;
  bool noise = true;  // compute permutation nulls and significance
};

/// Memoizing scanner over all feature sets of a given order. Results are
/// sorted ascending by CE, ties broken by label, and do not depend on the
/// order in which candidates were supplied.
class FactorScanner {
 public:
  FactorScanner(NamedColumn response, std::vector<NamedColumn> candidates, ScanOptions options = {});

  double response_entropy() const { return response_entropy_; }
  std::vector<FeatureSetResult> scan(int order);

  /// Conditional entropy of Y given the named candidates.
  double ce(const std::vector<std::string>& names);
  const NullDropStats& singleton_null(const std::string& name);
  FeatureSetResult evaluate(std::vector<std::string> names);

 private:
  const NamedColumn& candidate(const std::string& name) const;
  std::uint64_t seed_for(const std::string& name) const;

  NamedColumn response_;
  std::vector<NamedColumn> candidates_;  // sorted by name
  ScanOptions options_;
  double response_entropy_ = 0.0;
  std::map<std::vector<std::string>, double> ce_cache_;
  std::map<std::vector<std::string>, FeatureSetResult> result_cache_;
  std::map<std::string, NullDropStats> null_cache_;
};

std::vector<FeatureSetResult> scan_order1(const NamedColumn& response,
                                          const std::vector<NamedColumn>& candidates,
                                          const ScanOptions& options = {});
std::vector<FeatureSetResult> scan_order2(const NamedColumn& response,
                                          const std::vector<NamedColumn>& candidates,
                                          const ScanOptions& options = {});

/// `features,ce,rescaled_ce,ce_drop,sce_drop,null_mean,null_q95,significant,classification`
void write_scan_csv(std::ostream& out, const std::vector<FeatureSetResult>& results);
std::vector<FeatureSetResult> read_scan_csv(std::istream& in, const std::string& source = "scan");

enum class ReportFormat { Text, Markdown };

struct FactorReport {
  std::string body;
  std::vector<std::string> warnings;
};

/// Side-by-side table of the top_k and bottom_k rows of a 1-feature and a
/// 2-feature scan: `1-feature, CE, SCE-drop, 2-feature, CE, SCE-drop`, with
/// CE and SCE-drop re-scaled by H(Y) and printed to 4 decimals.
FactorReport factor_report(const std::vector<FeatureSetResult>& order1,
                           const std::vector<FeatureSetResult>& order2, int top_k, int bottom_k,
                           ReportFormat format, std::string_view title = {});

}  // namespace epicurve
