#include <benchmark/benchmark.h>

#include <random>

#include "bargain/attribution.hpp"
#include "bargain/gbt.hpp"
#include "bargain/shapley.hpp"

namespace {

std::vector<bargain::FeatureRow> synthetic_rows(std::size_t n) {
  std::mt19937_64 rng(11);
  std::vector<bargain::FeatureRow> rows(n);
  for (auto& r : rows) {
    r.features = {static_cast<int>(rng() % 6), static_cast<int>(rng() % 6),
                  static_cast<int>(rng() % 7), static_cast<int>(rng() % 7)};
    r.target = 45.0 + 3.0 * r.features[2] - 2.0 * r.features[3] + static_cast<double>(rng() % 5);
  }
  return rows;
}

void BM_FitGbt(benchmark::State& state) {
  const auto rows = synthetic_rows(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto model = bargain::fit_gbt(rows);
    benchmark::DoNotOptimize(model);
  }
}
BENCHMARK(BM_FitGbt)->Arg(500)->Arg(2000);

void BM_ShapleyDirect(benchmark::State& state) {
  const auto rows = synthetic_rows(500);
  const auto model = bargain::fit_gbt(rows);
  std::size_t i = 0;
  for (auto _ : state) {
    auto res = bargain::shapley(model, rows[i++ % rows.size()].features, rows);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_ShapleyDirect);

void BM_ShapleyExplainer(benchmark::State& state) {
  const auto rows = synthetic_rows(500);
  const auto model = bargain::fit_gbt(rows);
  const bargain::ShapleyExplainer explainer(model, rows);
  std::size_t i = 0;
  for (auto _ : state) {
    auto res = explainer.explain(rows[i++ % rows.size()].features);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_ShapleyExplainer);

}  // namespace
