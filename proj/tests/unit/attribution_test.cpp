#include "bargain/attribution.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

namespace {

RoundRecord rec(std::string seller, std::string buyer, Persona sp, Persona bp,
                std::optional<int> price) {
  RoundRecord r;
  r.round_id = "R";
  r.seller_model = std::move(seller);
  r.buyer_model = std::move(buyer);
  r.seller_persona = sp;
  r.buyer_persona = bp;
  r.end_reason = price ? EndReason::Agreement : EndReason::Rejected;
  r.final_price = price;
  r.winner = classify_outcome(r.end_reason, price, 50);
  r.turns_used = 2;
  return r;
}

// Balanced corpus where the price rises by 10 when the seller is Competitive.
std::vector<RoundRecord> planted() {
  std::vector<RoundRecord> out;
  const char* models[] = {"m1", "m2", "m3"};
  for (auto s : models) {
    for (auto b : models) {
      for (auto sp : {Persona::Competitive, Persona::Cooperative, Persona::Control}) {
        for (auto bp : {Persona::Competitive, Persona::Cooperative}) {
          out.push_back(rec(s, b, sp, bp, sp == Persona::Competitive ? 60 : 50));
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST(Encode, SharedModelDictionaryAndAgreementOnly) {
  std::vector<RoundRecord> rows{rec("zeta", "alpha", Persona::Selfish, Persona::Control, 55),
                                rec("alpha", "mid", Persona::Control, Persona::Cunning, std::nullopt),
                                rec("mid", "zeta", Persona::Desperate, Persona::Altruistic, 45)};
  const auto enc = encode_rounds(rows);
  EXPECT_EQ(enc.dictionary.models, (std::vector<std::string>{"alpha", "mid", "zeta"}));
  ASSERT_EQ(enc.rows.size(), 2u);
  EXPECT_EQ(enc.record_index, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(enc.rows[0].features,
            (std::vector<int>{2, 0, static_cast<int>(Persona::Selfish),
                              static_cast<int>(Persona::Control)}));
  EXPECT_EQ(enc.rows[0].target, 55.0);
  EXPECT_EQ(enc.dictionary.model_code("nope"), -1);
}

TEST(Attribution, DegenerateInputs) {
  std::vector<RoundRecord> rows{rec("a", "b", Persona::Control, Persona::Control, 55),
                                rec("a", "b", Persona::Control, Persona::Control, std::nullopt)};
  EXPECT_ERRC(fit_attribution(rows), Errc::DegenerateData);
}

TEST(Attribution, RecoversPlantedSellerEffect) {
  const auto fit = fit_attribution(planted());
  EXPECT_NEAR(fit.base_value, 50.0 + 10.0 / 3.0, 1e-6);
  const auto seller = persona_mean_shap(fit, Role::Seller);
  ASSERT_EQ(seller.size(), 3u);
  for (const auto& p : seller) {
    const double want = p.persona == Persona::Competitive ? 20.0 / 3.0 : -10.0 / 3.0;
    EXPECT_NEAR(p.mean_shap, want, 0.05) << to_string(p.persona);
    EXPECT_EQ(p.rows, 18u);
  }
  for (const auto& p : persona_mean_shap(fit, Role::Buyer)) EXPECT_NEAR(p.mean_shap, 0.0, 0.05);
  for (std::size_t i = 0; i < fit.shap.size(); ++i) {
    double sum = fit.shap[i].base_value;
    for (double v : fit.shap[i].values) sum += v;
    EXPECT_NEAR(sum, fit.model.predict(fit.encoded.rows[i].features), 1e-9);
  }
}

TEST(Attribution, InfluenceRangesPerModel) {
  const auto fit = fit_attribution(planted());
  const auto ranges = persona_influence_ranges(fit);
  ASSERT_EQ(ranges.size(), 3u);
  for (const auto& r : ranges) {
    EXPECT_EQ(r.seller_rows, 18u);
    EXPECT_EQ(r.buyer_rows, 18u);
    // mean |phi| over 1/3 at 20/3 and 2/3 at 10/3
    EXPECT_NEAR(r.seller_range, 40.0 / 9.0, 0.05);
    EXPECT_NEAR(r.buyer_range, 0.0, 0.05);
    EXPECT_DOUBLE_EQ(r.total_range, combine_ranges(r.seller_range, r.buyer_range));
  }
}

TEST(Attribution, ModelSeenInOneRole) {
  std::vector<RoundRecord> rows;
  for (int i = 0; i < 10; ++i) {
    rows.push_back(rec("seller-only", "buyer-only", i % 2 ? Persona::Selfish : Persona::Control,
                       Persona::Control, 50 + i));
  }
  const auto fit = fit_attribution(rows);
  EXPECT_ERRC(persona_influence_ranges(fit), Errc::ModelMissingRole);
}
