#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bargain/aggregate.hpp"
#include "bargain/attribution.hpp"

namespace bargain {

struct AnalysisOptions {
  GbtParams gbt;
  bool attribution = true;
};

struct AnalysisReport {
  std::size_t rounds = 0;
  AggregateTable overall;
  AggregateTable seller_models;
  AggregateTable buyer_models;
  AggregateTable seller_personas;
  AggregateTable buyer_personas;
  AggregateTable persona_pairs;
  Heatmap heatmap;
  std::optional<AttributionFit> fit;
  std::vector<PersonaShap> seller_shap;
  std::vector<PersonaShap> buyer_shap;
  std::optional<std::vector<ModelRange>> ranges;
  std::vector<std::string> warnings;
};

// Throws Error(EmptyInput). Attribution problems that leave the tables usable
// (too few agreements, a model seen in one role only) become warnings.
AnalysisReport analyze_rounds(std::span<const RoundRecord> records,
                              const AnalysisOptions& options = {});

// Fixed-point with `digits` decimals; empty for a missing value.
std::string format_fixed(std::optional<double> value, int digits = 4);

std::string table_csv(const AggregateTable& table);
std::string heatmap_csv(const Heatmap& heatmap);
std::string attribution_csv(const AnalysisReport& report);
std::string render_text_report(const AnalysisReport& report, const AnalysisOptions& options);

// Writes tables/*.csv, heatmap.csv, attribution.csv, report.txt and
// report_manifest.json under `dir`. Throws Error(StorageError).
void write_report(const std::filesystem::path& dir, const AnalysisReport& report,
                  const AnalysisOptions& options);

}  // namespace bargain
