#include "bargain/agents.hpp"

#include <set>

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

namespace {

const PersonaSpec& persona(Persona p) { return PersonaRegistry::builtin().get(p); }

NegotiationState after(std::initializer_list<Action> actions, RoundConfig cfg = {}) {
  auto s = new_round(cfg);
  for (const auto& a : actions) s = apply_action(std::move(s), s.next_actor(), "why", "hi", a);
  return s;
}

}  // namespace

TEST(Observe, HidesOpponentReasoning) {
  const auto s = after({Action::propose(70), Action::propose(40)});
  const auto obs = observe(s, Role::Seller, persona(Persona::Control));
  EXPECT_EQ(obs.private_valuation, 40);
  ASSERT_EQ(obs.public_transcript.size(), 2u);
  EXPECT_EQ(obs.own_reasoning.size(), 1u);
  EXPECT_EQ(obs.standing_offer, 40);
  EXPECT_EQ(obs.turns_remaining, 8);
  EXPECT_TRUE(obs.legal.contains(ActionKind::Accept));

  const auto buyer = observe(s, Role::Buyer, persona(Persona::Control));
  EXPECT_EQ(buyer.private_valuation, 60);
  EXPECT_TRUE(buyer.legal.empty());
  EXPECT_FALSE(buyer.standing_offer);  // its own proposal
}

TEST(ScriptedPolicy, ConcedesLinearlyToReserve) {
  ScriptedPolicy p{70, 10, 52, 60, false};
  auto s = new_round(RoundConfig{});
  std::vector<int> offers;
  for (int i = 0; i < 4; ++i) {
    const auto m = scripted_decide(p, observe(s, Role::Seller, persona(Persona::Control)));
    ASSERT_EQ(m.action.kind, ActionKind::Propose);
    offers.push_back(*m.action.price);
    s = apply_action(std::move(s), Role::Seller, m.reasoning, m.message, m.action);
    s = apply_action(std::move(s), Role::Buyer, "", "", Action::propose(30));
  }
  EXPECT_EQ(offers, (std::vector<int>{70, 60, 52, 52}));
}

TEST(ScriptedPolicy, AcceptsAtThreshold) {
  const ScriptedPolicy buyer{30, 5, 58, 55, false};
  const auto obs = observe(after({Action::propose(55)}), Role::Buyer, persona(Persona::Control));
  EXPECT_EQ(scripted_decide(buyer, obs).action, Action::accept());
  const auto obs2 = observe(after({Action::propose(56)}), Role::Buyer, persona(Persona::Control));
  EXPECT_EQ(scripted_decide(buyer, obs2).action.kind, ActionKind::Propose);
}

TEST(ScriptedPolicy, OptionalFinalTurnReject) {
  RoundConfig cfg;
  cfg.max_turns = 4;
  const auto s = after({Action::propose(70), Action::propose(30), Action::propose(65)}, cfg);
  const auto obs = observe(s, Role::Buyer, persona(Persona::Control));
  EXPECT_EQ(scripted_decide({30, 5, 58, 50, true}, obs).action, Action::reject());
  EXPECT_EQ(scripted_decide({30, 5, 58, 50, false}, obs).action.kind, ActionKind::Propose);
}

TEST(ScriptedPolicy, IsPure) {
  const ScriptedPolicy p{66, 4, 45, 55, false};
  const auto obs = observe(after({Action::propose(70), Action::propose(35)}), Role::Seller,
                           persona(Persona::Control));
  EXPECT_EQ(scripted_decide(p, obs), scripted_decide(p, obs));
}

TEST(ScriptedPolicy, ValidateRespectsValuations) {
  const RoundConfig cfg;
  EXPECT_ERRC(validate_policy({70, 5, 39, 55, false}, Role::Seller, cfg), Errc::InvalidConfig);
  EXPECT_ERRC(validate_policy({30, 5, 61, 45, false}, Role::Buyer, cfg), Errc::InvalidConfig);
  EXPECT_ERRC(validate_policy({30, -1, 50, 45, false}, Role::Buyer, cfg), Errc::InvalidConfig);
}

TEST(Presets, RespectValuationsForEveryPersona) {
  const RoundConfig cfg;
  for (auto p : kAllPersonas) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      EXPECT_NO_THROW(validate_policy(scripted_preset(p, Role::Seller, cfg, {}, seed),
                                      Role::Seller, cfg));
      EXPECT_NO_THROW(validate_policy(scripted_preset(p, Role::Buyer, cfg, {}, seed),
                                      Role::Buyer, cfg));
    }
  }
}

TEST(Presets, CompetitiveAnchorsHardestAndControlIsBaseline) {
  const RoundConfig cfg;
  const ScriptedVariant still{0, 0};
  const int control = scripted_preset(Persona::Control, Role::Seller, cfg, still).open_price;
  EXPECT_EQ(scripted_preset(Persona::Competitive, Role::Seller, cfg, still).open_price,
            control + 15);
  for (auto p : kAllPersonas) {
    EXPECT_LE(scripted_preset(p, Role::Seller, cfg, still).open_price,
              scripted_preset(Persona::Competitive, Role::Seller, cfg, still).open_price);
    EXPECT_GE(scripted_preset(p, Role::Buyer, cfg, still).open_price,
              scripted_preset(Persona::Competitive, Role::Buyer, cfg, still).open_price);
  }
}

TEST(Presets, JitterIsSeededAndBounded) {
  const RoundConfig cfg;
  const ScriptedVariant v{0, 3};
  const int center = scripted_preset(Persona::Control, Role::Seller, cfg, {0, 0}).open_price;
  std::set<int> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int open = scripted_preset(Persona::Control, Role::Seller, cfg, v, seed).open_price;
    EXPECT_EQ(open, scripted_preset(Persona::Control, Role::Seller, cfg, v, seed).open_price);
    EXPECT_LE(std::abs(open - center), 3);
    seen.insert(open);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Presets, AnchorOffsetMovesBothRoles) {
  const RoundConfig cfg;
  const auto s0 = scripted_preset(Persona::Selfish, Role::Seller, cfg, {0, 0});
  const auto s2 = scripted_preset(Persona::Selfish, Role::Seller, cfg, {2, 0});
  const auto b0 = scripted_preset(Persona::Selfish, Role::Buyer, cfg, {0, 0});
  const auto b2 = scripted_preset(Persona::Selfish, Role::Buyer, cfg, {2, 0});
  EXPECT_EQ(s2.open_price, s0.open_price + 2);
  EXPECT_EQ(b2.open_price, b0.open_price - 2);
}

TEST(LlmAgent, RequiresGatewayAndBudget) {
  EXPECT_ERRC(LlmAgent(nullptr, ModelEndpoint{}), Errc::InvalidConfig);
  auto mock = mock_transport({});
  EXPECT_ERRC(LlmAgent(mock.gateway, ModelEndpoint{}, -1), Errc::InvalidConfig);
}
