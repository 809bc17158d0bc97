#include "bargain/aggregate.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

namespace {

RoundRecord rec(std::string seller, std::string buyer, Persona sp, Persona bp,
                std::optional<int> price, EndReason reason = EndReason::Agreement) {
  RoundRecord r;
  r.round_id = "R";
  r.seller_model = std::move(seller);
  r.buyer_model = std::move(buyer);
  r.seller_persona = sp;
  r.buyer_persona = bp;
  r.end_reason = price ? EndReason::Agreement : reason;
  r.final_price = price;
  r.winner = classify_outcome(r.end_reason, price, 50);
  r.turns_used = price ? 2 : 10;
  return r;
}

const GroupStats& group(const AggregateTable& t, std::vector<std::string> key) {
  for (const auto& g : t.groups) {
    if (g.key == key) return g;
  }
  throw std::runtime_error("missing group");
}

constexpr auto C = Persona::Competitive;
constexpr auto K = Persona::Cooperative;

std::vector<RoundRecord> corpus() {
  return {rec("a", "b", C, K, 60), rec("a", "b", C, K, 58), rec("b", "a", K, C, 45),
          rec("b", "a", K, C, 50), rec("a", "a", C, C, std::nullopt, EndReason::Rejected),
          rec("b", "b", K, K, 40)};
}

}  // namespace

TEST(Aggregate, WinnerTableSharesAndPrices) {
  const auto t = aggregate(corpus(), Grouping::Winner);
  EXPECT_EQ(t.corpus_total, 6u);
  ASSERT_EQ(t.groups.size(), 3u);
  EXPECT_EQ(t.groups[0].key[0], "buyer");
  EXPECT_EQ(t.groups[1].key[0], "seller");
  EXPECT_EQ(t.groups[2].key[0], "draw");
  EXPECT_DOUBLE_EQ(t.share(0), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(*t.groups[0].avg_sale_price(), 42.5);
  EXPECT_DOUBLE_EQ(*t.groups[1].avg_sale_price(), 59.0);
  // Draw prices average only priced rounds: the 50 agreement.
  EXPECT_EQ(t.groups[2].total, 2u);
  EXPECT_EQ(t.groups[2].priced, 1u);
  EXPECT_DOUBLE_EQ(*t.groups[2].avg_sale_price(), 50.0);
}

TEST(Aggregate, ModelTablesCountFromEachSide) {
  const auto sellers = aggregate(corpus(), Grouping::SellerModel);
  const auto& a = group(sellers, {"a"});
  EXPECT_EQ(a.total, 3u);
  EXPECT_EQ(a.wins, 2u);
  EXPECT_EQ(a.draws, 1u);
  EXPECT_EQ(a.losses, 0u);
  EXPECT_DOUBLE_EQ(a.win_rate(), 2.0 / 3.0);

  const auto buyers = aggregate(corpus(), Grouping::BuyerModel);
  const auto& ba = group(buyers, {"a"});  // bought at 45 (win) and 50 (draw), and the rejection
  EXPECT_EQ(ba.total, 3u);
  EXPECT_EQ(ba.wins, 1u);
  EXPECT_EQ(ba.draws, 2u);
  const auto& bb = group(buyers, {"b"});
  EXPECT_EQ(bb.wins, 1u);
  EXPECT_EQ(bb.losses, 2u);
}

TEST(Aggregate, PersonaTablesAndPairs) {
  const auto sp = aggregate(corpus(), Grouping::SellerPersona);
  EXPECT_EQ(sp.groups[0].key[0], "Cooperative");  // enum order
  EXPECT_EQ(group(sp, {"Competitive"}).wins, 2u);
  const auto pairs = aggregate(corpus(), Grouping::PersonaPair);
  const auto& ck = group(pairs, {"Competitive", "Cooperative"});
  EXPECT_EQ(ck.total, 2u);
  EXPECT_DOUBLE_EQ(*ck.avg_sale_price(), 59.0);
  EXPECT_FALSE(group(pairs, {"Competitive", "Competitive"}).avg_sale_price());
}

TEST(Aggregate, EmptyInput) {
  const std::vector<RoundRecord> none;
  EXPECT_ERRC(aggregate(none, Grouping::Winner), Errc::EmptyInput);
  EXPECT_ERRC(pivot_heatmap(none), Errc::EmptyInput);
}

TEST(Heatmap, SparseCellsAreAbsent) {
  const auto h = pivot_heatmap(corpus());
  const auto& ck = h.at(C, K);
  EXPECT_TRUE(ck.present());
  EXPECT_DOUBLE_EQ(*ck.seller_win_rate(), 1.0);
  EXPECT_DOUBLE_EQ(*ck.avg_sale_price(), 59.0);
  const auto& kc = h.at(K, C);
  EXPECT_DOUBLE_EQ(*kc.seller_win_rate(), 0.0);
  EXPECT_DOUBLE_EQ(*kc.avg_sale_price(), 47.5);
  const auto& empty = h.at(Persona::Desperate, Persona::Selfish);
  EXPECT_FALSE(empty.present());
  EXPECT_FALSE(empty.seller_win_rate());
  EXPECT_FALSE(empty.avg_sale_price());
  const auto& cc = h.at(C, C);
  EXPECT_TRUE(cc.present());
  EXPECT_FALSE(cc.avg_sale_price());
}

TEST(Aggregate, FixtureTotals) {
  const auto rows = load_results(bt::fixture_path("outcome_corpus.csv"));
  const auto t = aggregate(rows, Grouping::Winner);
  EXPECT_EQ(t.groups[0].total, 929u);
  EXPECT_EQ(t.groups[0].price_sum, 38415);
  EXPECT_EQ(t.groups[1].total, 712u);
  EXPECT_EQ(t.groups[1].price_sum, 42385);
  EXPECT_EQ(t.groups[2].total, 96u);
}
