#include "bargain/shapley.hpp"

#include <algorithm>
#include <map>

#include "bargain/error.hpp"

namespace bargain {

namespace {

constexpr std::size_t kMaxGridCells = std::size_t{1} << 20;

// weight[k] = k! (n-k-1)! / n!
std::vector<double> coalition_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    double v = 1.0 / static_cast<double>(n);
    // 1 / (n * C(n-1, k))
    for (std::size_t j = 1; j <= k; ++j) {
      v *= static_cast<double>(j) / static_cast<double>(n - j);
    }
    w[k] = v;
  }
  return w;
}

std::vector<double> combine(std::span<const double> v, std::size_t n) {
  const auto w = coalition_weights(n);
  std::vector<double> phi(n, 0.0);
  const std::size_t full = std::size_t{1} << n;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double acc = 0.0;
    for (std::size_t s = 0; s < full; ++s) {
      if (s & bit) continue;
      acc += w[static_cast<std::size_t>(__builtin_popcountll(s))] * (v[s | bit] - v[s]);
    }
    phi[i] = acc;
  }
  return phi;
}

void check_shape(const BoostedModel& model, std::size_t n_instance) {
  if (n_instance != model.n_features) {
    throw Error(Errc::InvalidParams, "instance has " + std::to_string(n_instance) +
                                         " features, model expects " +
                                         std::to_string(model.n_features));
  }
  if (n_instance > kMaxShapleyFeatures) {
    throw Error(Errc::InvalidParams, "too many features for exact enumeration");
  }
}

}  // namespace

ShapleyResult shapley(const BoostedModel& model, std::span<const int> instance,
                      std::span<const FeatureRow> background) {
  if (background.empty()) throw Error(Errc::EmptyInput, "Shapley background is empty");
  const std::size_t n = instance.size();
  check_shape(model, n);

  const std::size_t full = std::size_t{1} << n;
  std::vector<double> v(full, 0.0);
  std::vector<int> x(n);
  for (std::size_t s = 0; s < full; ++s) {
    double acc = 0.0;
    for (const auto& b : background) {
      for (std::size_t f = 0; f < n; ++f) x[f] = (s >> f) & 1u ? instance[f] : b.features[f];
      acc += model.predict(x);
    }
    v[s] = acc / static_cast<double>(background.size());
  }

  ShapleyResult out;
  out.base_value = v[0];
  out.prediction = model.predict(instance);
  out.values = combine(v, n);
  return out;
}

ShapleyExplainer::ShapleyExplainer(const BoostedModel& model,
                                   std::span<const FeatureRow> background)
    : model_(model), n_features_(model.n_features) {
  if (background.empty()) throw Error(Errc::EmptyInput, "Shapley background is empty");
  if (n_features_ > kMaxShapleyFeatures) {
    throw Error(Errc::InvalidParams, "too many features for exact enumeration");
  }

  std::map<std::vector<int>, std::size_t> counts;
  for (const auto& b : background) {
    if (b.features.size() != n_features_) {
      throw Error(Errc::InvalidParams, "background row has the wrong feature count");
    }
    ++counts[b.features];
  }
  const double total = static_cast<double>(background.size());
  for (const auto& [row, c] : counts) {
    background_.push_back(row);
    weight_.push_back(static_cast<double>(c) / total);
  }

  cardinality_.assign(n_features_, 1);
  for (const auto& row : background_) {
    for (std::size_t f = 0; f < n_features_; ++f) {
      cardinality_[f] = std::max(cardinality_[f], row[f] + 1);
    }
  }
  std::size_t cells = 1;
  stride_.assign(n_features_, 0);
  bool fits = true;
  for (std::size_t f = 0; f < n_features_; ++f) {
    stride_[f] = cells;
    cells *= static_cast<std::size_t>(cardinality_[f]);
    if (cells > kMaxGridCells) {
      fits = false;
      break;
    }
  }
  if (fits) {
    grid_.resize(cells);
    std::vector<int> x(n_features_, 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t rest = cell;
      for (std::size_t f = 0; f < n_features_; ++f) {
        x[f] = static_cast<int>(rest % static_cast<std::size_t>(cardinality_[f]));
        rest /= static_cast<std::size_t>(cardinality_[f]);
      }
      grid_[cell] = model_.predict(x);
    }
  }

  for (std::size_t j = 0; j < background_.size(); ++j) {
    base_value_ += weight_[j] * predict(background_[j]);
  }
}

double ShapleyExplainer::predict(std::span<const int> x) const {
  if (grid_.empty()) return model_.predict(x);
  std::size_t cell = 0;
  for (std::size_t f = 0; f < n_features_; ++f) {
    if (x[f] < 0 || x[f] >= cardinality_[f]) return model_.predict(x);
    cell += static_cast<std::size_t>(x[f]) * stride_[f];
  }
  return grid_[cell];
}

ShapleyResult ShapleyExplainer::explain(std::span<const int> instance) const {
  check_shape(model_, instance.size());
  const std::size_t n = n_features_;
  const std::size_t full = std::size_t{1} << n;
  std::vector<double> v(full, 0.0);
  std::vector<int> x(n);
  for (std::size_t s = 0; s < full; ++s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < background_.size(); ++j) {
      const auto& b = background_[j];
      for (std::size_t f = 0; f < n; ++f) x[f] = (s >> f) & 1u ? instance[f] : b[f];
      acc += weight_[j] * predict(x);
    }
    v[s] = acc;
  }
  ShapleyResult out;
  out.base_value = v[0];
  out.prediction = predict(instance);
  out.values = combine(v, n);
  return out;
}

}  // namespace bargain
