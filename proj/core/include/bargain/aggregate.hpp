#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bargain/personas.hpp"
#include "bargain/tournament.hpp"

namespace bargain {

enum class Grouping : std::uint8_t {
  Winner,         // one group per outcome class
  SellerModel,    // wins counted from the seller's side
  BuyerModel,     // wins counted from the buyer's side
  SellerPersona,
  BuyerPersona,
  PersonaPair,    // (seller_persona, buyer_persona); wins are seller wins
};

std::string_view to_string(Grouping grouping) noexcept;

struct GroupStats {
  std::vector<std::string> key;  // one element, two for PersonaPair
  std::size_t total = 0;
  std::size_t wins = 0;
  std::size_t draws = 0;
  std::size_t losses = 0;
  std::size_t priced = 0;     // rounds contributing to the average price
  long long price_sum = 0;

  std::optional<double> avg_sale_price() const;
  double win_rate() const;
  double draw_rate() const;
};

struct AggregateTable {
  Grouping grouping = Grouping::Winner;
  std::size_t corpus_total = 0;
  std::vector<GroupStats> groups;

  // Fraction of the corpus falling in group `i`.
  double share(std::size_t i) const;
};

// Throws Error(EmptyInput).
AggregateTable aggregate(std::span<const RoundRecord> records, Grouping grouping);

struct HeatCell {
  std::size_t total = 0;
  std::size_t seller_wins = 0;
  std::size_t priced = 0;
  long long price_sum = 0;

  bool present() const { return total > 0; }
  std::optional<double> seller_win_rate() const;
  std::optional<double> avg_sale_price() const;
};

// Indexed [seller_persona][buyer_persona].
struct Heatmap {
  std::array<std::array<HeatCell, kPersonaCount>, kPersonaCount> cells{};

  const HeatCell& at(Persona seller, Persona buyer) const {
    return cells[static_cast<std::size_t>(seller)][static_cast<std::size_t>(buyer)];
  }
};

// Throws Error(EmptyInput).
Heatmap pivot_heatmap(std::span<const RoundRecord> records);

}  // namespace bargain
