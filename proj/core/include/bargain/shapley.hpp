#pragma once

// Exact interventional Shapley values: every coalition of features is
// enumerated, absent features are filled from each background row in turn and
// the model output is averaged.

#include <span>
#include <vector>

#include "bargain/gbt.hpp"

namespace bargain {

inline constexpr std::size_t kMaxShapleyFeatures = 16;

struct ShapleyResult {
  double base_value = 0.0;  // mean prediction over the background
  double prediction = 0.0;  // model output at the instance
  std::vector<double> values;
};

// Throws Error(EmptyInput) for an empty background, Error(InvalidParams) when
// the feature count exceeds kMaxShapleyFeatures or does not match the model.
ShapleyResult shapley(const BoostedModel& model, std::span<const int> instance,
                      std::span<const FeatureRow> background);

// Same values as shapley(), for many instances against one background.
// Predictions are cached over the category grid and duplicate background rows
// are merged.
class ShapleyExplainer {
 public:
  ShapleyExplainer(const BoostedModel& model, std::span<const FeatureRow> background);

  ShapleyResult explain(std::span<const int> instance) const;
  double base_value() const { return base_value_; }

 private:
  double predict(std::span<const int> x) const;

  const BoostedModel& model_;
  std::size_t n_features_;
  std::vector<std::vector<int>> background_;  // distinct rows
  std::vector<double> weight_;                // multiplicity / total
  std::vector<int> cardinality_;
  std::vector<std::size_t> stride_;
  std::vector<double> grid_;  // empty when the grid is too large to cache
  double base_value_ = 0.0;
};

}  // namespace bargain
