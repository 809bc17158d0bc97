#pragma once

// Price-model attribution over the four round features: seller model, buyer
// model, seller persona, buyer persona.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bargain/gbt.hpp"
#include "bargain/personas.hpp"
#include "bargain/shapley.hpp"
#include "bargain/tournament.hpp"

namespace bargain {

enum class Feature : std::uint8_t { SellerModel, BuyerModel, SellerPersona, BuyerPersona };
inline constexpr std::size_t kFeatureCount = 4;

std::string_view to_string(Feature feature) noexcept;

// Model labels share one code space across both model features; persona codes
// are the Persona enumerators.
struct CategoryDictionary {
  std::vector<std::string> models;  // sorted

  int model_code(std::string_view label) const;  // -1 when unknown
};

struct EncodedRounds {
  CategoryDictionary dictionary;
  std::vector<FeatureRow> rows;             // Agreement rounds only
  std::vector<std::size_t> record_index;    // rows[i] came from records[record_index[i]]
};

// Throws Error(InvalidParams) if there are more model labels than codes.
EncodedRounds encode_rounds(std::span<const RoundRecord> records);

struct AttributionFit {
  EncodedRounds encoded;
  BoostedModel model;
  double base_value = 0.0;
  std::vector<ShapleyResult> shap;  // one per encoded row, background = all rows
};

// Throws Error(DegenerateData) when fewer than two rounds reached agreement.
AttributionFit fit_attribution(std::span<const RoundRecord> records, const GbtParams& params = {});

struct PersonaShap {
  Persona persona = Persona::Control;
  std::size_t rows = 0;
  double mean_shap = 0.0;
};

// Mean Shapley value of the role's persona feature, per persona present in
// the rows for that role. Personas with no rows are omitted.
std::vector<PersonaShap> persona_mean_shap(const AttributionFit& fit, Role role);

struct ModelRange {
  std::string model;
  std::size_t seller_rows = 0;
  std::size_t buyer_rows = 0;
  double seller_range = 0.0;
  double buyer_range = 0.0;
  double total_range = 0.0;
};

inline double combine_ranges(double seller_range, double buyer_range) {
  return seller_range + buyer_range;
}

// Mean |Shapley| of the seller-persona feature over rows where the model sells,
// and of the buyer-persona feature where it buys. Throws Error(ModelMissingRole)
// if a model has rows in only one role.
std::vector<ModelRange> persona_influence_ranges(const AttributionFit& fit);

}  // namespace bargain
