#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sigmove/features.hpp"
#include "sigmove/seed.hpp"

namespace sigmove {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0 -> floor(sqrt(p))
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_split = 2;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

// floor(sqrt(p)), at least 1.
std::size_t default_max_features(std::size_t n_features) noexcept;

/// One node of a fitted tree. Leaves have feature == kLeaf.
struct TreeNode {
  static constexpr std::uint32_t kLeaf = 0xffffffffu;

  std::uint32_t feature = kLeaf;
  double threshold = 0.0;  // left: x[feature] <= threshold
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double positive_fraction = 0.0;
  std::size_t sample_count = 0;

  bool is_leaf() const noexcept { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

/// Preorder node array; nodes[0] is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  std::size_t leaf_index(std::span<const double> x) const;
  double predict(std::span<const double> x) const { return nodes[leaf_index(x)].positive_fraction; }
  std::size_t depth() const;
  bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  ForestConfig config;
  std::size_t n_features = 0;
  std::size_t n_train = 0;
};

double gini_impurity(std::span<const std::uint8_t> labels);
double gini_impurity(std::size_t n_pos, std::size_t n) noexcept;

// Fits a CART tree on the listed rows (duplicates allowed, as in a bootstrap
// sample). max_features must already be resolved (non-zero, <= cols).
DecisionTree fit_tree(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                      std::span<const std::size_t> rows, const ForestConfig& config, Rng& rng);

// Fits on the dataset's training partition.
ForestModel fit_forest(const LabeledDataset& dataset, const ForestConfig& config);
ForestModel fit_forest(const FeatureMatrix& features, std::span<const std::uint8_t> labels,
                       std::size_t n_rows, const ForestConfig& config);

// Mean over trees of the leaf positive fraction.
std::vector<double> forest_predict_proba(const ForestModel& model, const FeatureMatrix& features);

void save_forest(const ForestModel& model, std::ostream& out);
ForestModel load_forest(std::istream& in);

}  // namespace sigmove
