#include "bargain/aggregate.hpp"

#include <algorithm>
#include <map>

#include "bargain/error.hpp"

namespace bargain {

namespace {

std::vector<std::string> group_key(const RoundRecord& r, Grouping g) {
  switch (g) {
    case Grouping::Winner: return {std::string(to_string(r.winner))};
    case Grouping::SellerModel: return {r.seller_model};
    case Grouping::BuyerModel: return {r.buyer_model};
    case Grouping::SellerPersona: return {std::string(to_string(r.seller_persona))};
    case Grouping::BuyerPersona: return {std::string(to_string(r.buyer_persona))};
    case Grouping::PersonaPair:
      return {std::string(to_string(r.seller_persona)), std::string(to_string(r.buyer_persona))};
  }
  return {};
}

// Sort rank for keys with a natural order; strings sort after.
int key_rank(const std::string& part, Grouping g) {
  if (g == Grouping::Winner) {
    if (auto w = parse_winner(part)) {
      switch (*w) {
        case Winner::BuyerWin: return 0;
        case Winner::SellerWin: return 1;
        case Winner::Draw: return 2;
      }
    }
  }
  if (g == Grouping::SellerPersona || g == Grouping::BuyerPersona ||
      g == Grouping::PersonaPair) {
    if (auto p = parse_persona(part)) return static_cast<int>(*p);
  }
  return 1000;
}

Role side(Grouping g) {
  return g == Grouping::BuyerModel || g == Grouping::BuyerPersona ? Role::Buyer : Role::Seller;
}

}  // namespace

std::string_view to_string(Grouping grouping) noexcept {
  switch (grouping) {
    case Grouping::Winner: return "winner";
    case Grouping::SellerModel: return "seller_model";
    case Grouping::BuyerModel: return "buyer_model";
    case Grouping::SellerPersona: return "seller_persona";
    case Grouping::BuyerPersona: return "buyer_persona";
    case Grouping::PersonaPair: return "persona_pair";
  }
  return "?";
}

std::optional<double> GroupStats::avg_sale_price() const {
  if (priced == 0) return std::nullopt;
  return static_cast<double>(price_sum) / static_cast<double>(priced);
}

double GroupStats::win_rate() const {
  return total ? static_cast<double>(wins) / static_cast<double>(total) : 0.0;
}

double GroupStats::draw_rate() const {
  return total ? static_cast<double>(draws) / static_cast<double>(total) : 0.0;
}

double AggregateTable::share(std::size_t i) const {
  return corpus_total ? static_cast<double>(groups.at(i).total) /
                            static_cast<double>(corpus_total)
                      : 0.0;
}

AggregateTable aggregate(std::span<const RoundRecord> records, Grouping grouping) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no rounds to aggregate");
  const Winner win = side(grouping) == Role::Seller ? Winner::SellerWin : Winner::BuyerWin;
  const Winner loss = win == Winner::SellerWin ? Winner::BuyerWin : Winner::SellerWin;

  std::map<std::vector<std::string>, GroupStats> groups;
  for (const auto& r : records) {
    auto key = group_key(r, grouping);
    auto& g = groups[key];
    if (g.key.empty()) g.key = std::move(key);
    ++g.total;
    if (r.winner == Winner::Draw) {
      ++g.draws;
    } else if (grouping == Grouping::Winner || r.winner == win) {
      // An outcome-class group counts its decided rounds as wins for that class.
      ++g.wins;
    } else if (r.winner == loss) {
      ++g.losses;
    }
    if (r.final_price) {
      ++g.priced;
      g.price_sum += *r.final_price;
    }
  }

  AggregateTable table;
  table.grouping = grouping;
  table.corpus_total = records.size();
  for (auto& [_, g] : groups) table.groups.push_back(std::move(g));
  std::stable_sort(table.groups.begin(), table.groups.end(),
                   [grouping](const GroupStats& a, const GroupStats& b) {
                     for (std::size_t i = 0; i < a.key.size(); ++i) {
                       const int ra = key_rank(a.key[i], grouping);
                       const int rb = key_rank(b.key[i], grouping);
                       if (ra != rb) return ra < rb;
                       if (a.key[i] != b.key[i]) return a.key[i] < b.key[i];
                     }
                     return false;
                   });
  return table;
}

std::optional<double> HeatCell::seller_win_rate() const {
  if (!total) return std::nullopt;
  return static_cast<double>(seller_wins) / static_cast<double>(total);
}

std::optional<double> HeatCell::avg_sale_price() const {
  if (!priced) return std::nullopt;
  return static_cast<double>(price_sum) / static_cast<double>(priced);
}

Heatmap pivot_heatmap(std::span<const RoundRecord> records) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no rounds for heatmap");
  Heatmap map;
  for (const auto& r : records) {
    auto& cell = map.cells[static_cast<std::size_t>(r.seller_persona)]
                          [static_cast<std::size_t>(r.buyer_persona)];
    ++cell.total;
    if (r.winner == Winner::SellerWin) ++cell.seller_wins;
    if (r.final_price) {
      ++cell.priced;
      cell.price_sum += *r.final_price;
    }
  }
  return map;
}

}  // namespace bargain
