#include "bargain/gbt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "bargain/error.hpp"

namespace bargain {

namespace {

struct Split {
  int feature = -1;
  std::uint64_t left_set = 0;
  double gain = 0.0;
};

struct Builder {
  const std::vector<FeatureRow>& rows;
  const std::vector<double>& residual;
  const GbtParams& params;
  std::size_t n_features;
  RegressionTree tree;

  double sum_of(std::span<const std::size_t> idx) const {
    double s = 0.0;
    for (auto i : idx) s += residual[i];
    return s;
  }

  Split best_split(std::span<const std::size_t> idx) const {
    const double n = static_cast<double>(idx.size());
    const double total = sum_of(idx);
    const double parent = total * total / n;
    const std::size_t min_leaf = static_cast<std::size_t>(params.min_samples_leaf);
    // Gains below this are rounding noise relative to the node's scale.
    double sq = 0.0;
    for (auto i : idx) sq += residual[i] * residual[i];
    const double eps = 1e-12 * std::max(sq, 1e-300);

    Split best;
    for (std::size_t f = 0; f < n_features; ++f) {
      std::array<double, kMaxCategories> sum{};
      std::array<std::size_t, kMaxCategories> count{};
      for (auto i : idx) {
        const int c = rows[i].features[f];
        sum[c] += residual[i];
        ++count[c];
      }
      std::vector<int> cats;
      for (int c = 0; c < kMaxCategories; ++c) {
        if (count[c]) cats.push_back(c);
      }
      if (cats.size() < 2) continue;
      std::stable_sort(cats.begin(), cats.end(), [&](int a, int b) {
        return sum[a] / static_cast<double>(count[a]) < sum[b] / static_cast<double>(count[b]);
      });

      double left_sum = 0.0;
      std::size_t left_n = 0;
      std::uint64_t mask = 0;
      for (std::size_t k = 0; k + 1 < cats.size(); ++k) {
        const int c = cats[k];
        left_sum += sum[c];
        left_n += count[c];
        mask |= std::uint64_t{1} << c;
        const std::size_t right_n = idx.size() - left_n;
        if (left_n < min_leaf || right_n < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                            right_sum * right_sum / static_cast<double>(right_n) - parent;
        if (gain > eps && gain > best.gain + eps) {
          best = {static_cast<int>(f), mask, gain};
        }
      }
    }
    return best;
  }

  int grow(std::vector<std::size_t> idx, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].value = sum_of(idx) / static_cast<double>(idx.size());
    if (depth >= params.max_depth) return id;
    const auto split = best_split(idx);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      const int c = rows[i].features[static_cast<std::size_t>(split.feature)];
      ((split.left_set >> c) & 1u ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    auto& node = tree.nodes[id];
    node.feature = split.feature;
    node.left_set = split.left_set;
    node.left = l;
    node.right = r;
    return id;
  }
};

double mean_squared(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s / static_cast<double>(r.size());
}

}  // namespace

void GbtParams::validate() const {
  if (n_trees < 0) throw Error(Errc::InvalidParams, "n_trees must be >= 0");
  if (max_depth < 1) throw Error(Errc::InvalidParams, "max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw Error(Errc::InvalidParams, "learning_rate must be in (0, 1]");
  }
  if (min_samples_leaf < 1) throw Error(Errc::InvalidParams, "min_samples_leaf must be >= 1");
}

double RegressionTree::predict(std::span<const int> features) const {
  int i = 0;
  for (;;) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) return n.value;
    const int c = features[static_cast<std::size_t>(n.feature)];
    i = (n.left_set >> c) & 1u ? n.left : n.right;
  }
}

int RegressionTree::depth() const {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& n = nodes[static_cast<std::size_t>(i)];
    if (n.feature >= 0) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

bool RegressionTree::uses_feature(int feature) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [feature](const TreeNode& n) { return n.feature == feature; });
}

double BoostedModel::predict(std::span<const int> features) const {
  double sum = 0.0;
  for (const auto& t : trees) sum += t.predict(features);
  return base_score + learning_rate * sum;
}

BoostedModel fit_gbt(std::span<const FeatureRow> input, const GbtParams& params) {
  params.validate();
  if (input.size() < 2) throw Error(Errc::DegenerateData, "need at least two rows to fit");
  const std::size_t n_features = input.front().features.size();
  for (const auto& r : input) {
    if (!std::isfinite(r.target)) throw Error(Errc::DegenerateData, "non-finite target");
    if (r.features.size() != n_features) {
      throw Error(Errc::InvalidParams, "rows have differing feature counts");
    }
    for (int c : r.features) {
      if (c < 0 || c >= kMaxCategories) {
        throw Error(Errc::InvalidParams, "category code " + std::to_string(c) + " out of range");
      }
    }
  }

  // A canonical row order makes the fit independent of input order.
  std::vector<FeatureRow> rows(input.begin(), input.end());
  std::sort(rows.begin(), rows.end(), [](const FeatureRow& a, const FeatureRow& b) {
    if (a.features != b.features) return a.features < b.features;
    return a.target < b.target;
  });

  BoostedModel model;
  model.n_features = n_features;
  model.learning_rate = params.learning_rate;
  model.params = params;
  double total = 0.0;
  for (const auto& r : rows) total += r.target;
  model.base_score = total / static_cast<double>(rows.size());

  std::vector<double> residual(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) residual[i] = rows[i].target - model.base_score;
  model.loss_history.push_back(mean_squared(residual));

  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (int t = 0; t < params.n_trees; ++t) {
    Builder b{rows, residual, params, n_features, {}};
    b.grow(all, 0);
    if (b.tree.nodes.size() == 1) break;  // root cannot split: nothing left to learn
    for (std::size_t i = 0; i < rows.size(); ++i) {
      residual[i] -= params.learning_rate * b.tree.predict(rows[i].features);
    }
    model.trees.push_back(std::move(b.tree));
    model.loss_history.push_back(mean_squared(residual));
  }
  return model;
}

}  // namespace bargain
