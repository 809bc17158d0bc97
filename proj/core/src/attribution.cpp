#include "bargain/attribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "bargain/error.hpp"

namespace bargain {

std::string_view to_string(Feature feature) noexcept {
  switch (feature) {
    case Feature::SellerModel: return "seller_model";
    case Feature::BuyerModel: return "buyer_model";
    case Feature::SellerPersona: return "seller_persona";
    case Feature::BuyerPersona: return "buyer_persona";
  }
  return "?";
}

int CategoryDictionary::model_code(std::string_view label) const {
  const auto it = std::lower_bound(models.begin(), models.end(), label);
  if (it == models.end() || *it != label) return -1;
  return static_cast<int>(it - models.begin());
}

EncodedRounds encode_rounds(std::span<const RoundRecord> records) {
  EncodedRounds out;
  std::set<std::string> labels;
  for (const auto& r : records) {
    if (!r.final_price) continue;
    labels.insert(r.seller_model);
    labels.insert(r.buyer_model);
  }
  if (labels.size() > static_cast<std::size_t>(kMaxCategories)) {
    throw Error(Errc::InvalidParams, "more than " + std::to_string(kMaxCategories) +
                                         " distinct model labels");
  }
  out.dictionary.models.assign(labels.begin(), labels.end());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.end_reason != EndReason::Agreement || !r.final_price) continue;
    FeatureRow row;
    row.features = {out.dictionary.model_code(r.seller_model),
                    out.dictionary.model_code(r.buyer_model),
                    static_cast<int>(r.seller_persona), static_cast<int>(r.buyer_persona)};
    row.target = static_cast<double>(*r.final_price);
    out.rows.push_back(std::move(row));
    out.record_index.push_back(i);
  }
  return out;
}

AttributionFit fit_attribution(std::span<const RoundRecord> records, const GbtParams& params) {
  AttributionFit fit;
  fit.encoded = encode_rounds(records);
  if (fit.encoded.rows.size() < 2) {
    throw Error(Errc::DegenerateData, "need at least two agreement rounds to fit a price model");
  }
  fit.model = fit_gbt(fit.encoded.rows, params);
  const ShapleyExplainer explainer(fit.model, fit.encoded.rows);
  fit.base_value = explainer.base_value();
  fit.shap.reserve(fit.encoded.rows.size());
  for (const auto& row : fit.encoded.rows) fit.shap.push_back(explainer.explain(row.features));
  return fit;
}

std::vector<PersonaShap> persona_mean_shap(const AttributionFit& fit, Role role) {
  const auto feature = static_cast<std::size_t>(role == Role::Seller ? Feature::SellerPersona
                                                                     : Feature::BuyerPersona);
  std::array<double, kPersonaCount> sum{};
  std::array<std::size_t, kPersonaCount> count{};
  for (std::size_t i = 0; i < fit.encoded.rows.size(); ++i) {
    const auto p = static_cast<std::size_t>(fit.encoded.rows[i].features[feature]);
    sum[p] += fit.shap[i].values[feature];
    ++count[p];
  }
  std::vector<PersonaShap> out;
  for (auto p : kAllPersonas) {
    const auto k = static_cast<std::size_t>(p);
    if (!count[k]) continue;
    out.push_back({p, count[k], sum[k] / static_cast<double>(count[k])});
  }
  return out;
}

std::vector<ModelRange> persona_influence_ranges(const AttributionFit& fit) {
  const auto& models = fit.encoded.dictionary.models;
  std::vector<ModelRange> out(models.size());
  std::vector<double> seller_abs(models.size(), 0.0), buyer_abs(models.size(), 0.0);
  constexpr auto sm = static_cast<std::size_t>(Feature::SellerModel);
  constexpr auto bm = static_cast<std::size_t>(Feature::BuyerModel);
  constexpr auto sp = static_cast<std::size_t>(Feature::SellerPersona);
  constexpr auto bp = static_cast<std::size_t>(Feature::BuyerPersona);
  for (std::size_t i = 0; i < fit.encoded.rows.size(); ++i) {
    const auto& row = fit.encoded.rows[i].features;
    const auto s = static_cast<std::size_t>(row[sm]);
    const auto b = static_cast<std::size_t>(row[bm]);
    seller_abs[s] += std::abs(fit.shap[i].values[sp]);
    ++out[s].seller_rows;
    buyer_abs[b] += std::abs(fit.shap[i].values[bp]);
    ++out[b].buyer_rows;
  }
  for (std::size_t m = 0; m < models.size(); ++m) {
    auto& r = out[m];
    r.model = models[m];
    if (!r.seller_rows || !r.buyer_rows) {
      throw Error(Errc::ModelMissingRole,
                  "model '" + r.model + "' has no agreement rounds as " +
                      (r.seller_rows ? "buyer" : "seller"));
    }
    r.seller_range = seller_abs[m] / static_cast<double>(r.seller_rows);
    r.buyer_range = buyer_abs[m] / static_cast<double>(r.buyer_rows);
    r.total_range = combine_ranges(r.seller_range, r.buyer_range);
  }
  return out;
}

}  // namespace bargain
