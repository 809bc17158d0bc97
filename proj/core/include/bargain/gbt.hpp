#pragma once

// Squared-error gradient boosting over small categorical features. Each split
// sends a subset of category codes left, so the codes must lie in [0, 64).

#include <cstdint>
#include <span>
#include <vector>

namespace bargain {

inline constexpr int kMaxCategories = 64;

struct FeatureRow {
  std::vector<int> features;  // category codes
  double target = 0.0;
};

struct GbtParams {
  int n_trees = 200;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_leaf = 5;

  // Throws Error(InvalidParams).
  void validate() const;
};

struct TreeNode {
  int feature = -1;           // -1 marks a leaf
  std::uint64_t left_set = 0; // bit c set: category c goes left
  int left = -1;
  int right = -1;
  double value = 0.0;         // leaf output before the learning rate
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const int> features) const;
  int depth() const;
  bool uses_feature(int feature) const;
};

struct BoostedModel {
  std::size_t n_features = 0;
  double base_score = 0.0;
  double learning_rate = 0.1;
  GbtParams params;
  std::vector<RegressionTree> trees;
  // Mean squared training error: entry 0 before any tree, then one per tree.
  std::vector<double> loss_history;

  double predict(std::span<const int> features) const;
};

// Throws Error(DegenerateData) for fewer than two rows or non-finite targets,
// Error(InvalidParams) for bad params, ragged rows or out-of-range codes.
BoostedModel fit_gbt(std::span<const FeatureRow> rows, const GbtParams& params = {});

}  // namespace bargain
