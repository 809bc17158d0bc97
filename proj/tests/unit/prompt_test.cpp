#include "bargain/agents.hpp"

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

namespace {

const PersonaSpec& persona(Persona p) { return PersonaRegistry::builtin().get(p); }

NegotiationState after(std::initializer_list<AgentMove> moves, RoundConfig cfg = {}) {
  auto s = new_round(cfg);
  for (const auto& m : moves) {
    s = apply_action(std::move(s), s.next_actor(), m.reasoning, m.message, m.action);
  }
  return s;
}

Observation opening() {
  return observe(new_round(RoundConfig{}), Role::Seller, persona(Persona::Control));
}

Observation facing_offer(int price) {
  return observe(after({{"r", "m", Action::propose(price)}}), Role::Buyer,
                 persona(Persona::Control));
}

ModelEndpoint endpoint() {
  ModelEndpoint ep;
  ep.model_id = "mock";
  return ep;
}

}  // namespace

TEST(Prompt, SystemMessageCarriesOnlyOwnValuation) {
  const RoundConfig cfg;
  const auto seller = build_prompt(opening(), cfg);
  ASSERT_FALSE(seller.empty());
  EXPECT_EQ(seller.front().role, "system");
  EXPECT_NE(seller.front().content.find("cost you 40"), std::string::npos);
  EXPECT_EQ(seller.front().content.find("60"), std::string::npos);
  EXPECT_NE(seller.front().content.find("```move"), std::string::npos);

  const auto buyer = build_prompt(facing_offer(70), cfg);
  EXPECT_NE(buyer.front().content.find("able to pay for X is 60"), std::string::npos);
  EXPECT_EQ(buyer.front().content.find("cost you"), std::string::npos);
}

TEST(Prompt, PersonaBlockOnlyForNonControl) {
  const RoundConfig cfg;
  const auto control = build_prompt(opening(), cfg).front().content;
  EXPECT_EQ(control.find("Your personality"), std::string::npos);
  const auto obs = observe(new_round(cfg), Role::Seller, persona(Persona::Competitive));
  const auto comp = build_prompt(obs, cfg).front().content;
  EXPECT_NE(comp.find("Your personality"), std::string::npos);
  EXPECT_NE(comp.find(persona(Persona::Competitive).prompt_variants[0]), std::string::npos);
}

TEST(Prompt, OpponentReasoningNeverLeaks) {
  const auto s = after({{"seller secret", "hello buyer", Action::propose(72)},
                        {"buyer secret", "too much", Action::propose(38)}});
  const auto msgs = build_prompt(observe(s, Role::Seller, persona(Persona::Control)), RoundConfig{});
  std::string all;
  for (const auto& m : msgs) all += m.content + "\n";
  EXPECT_NE(all.find("seller secret"), std::string::npos);  // own history
  EXPECT_EQ(all.find("buyer secret"), std::string::npos);
  EXPECT_NE(all.find("Turn 2, Buyer says: \"too much\" and proposes 38."), std::string::npos);
}

TEST(Prompt, RolesAlternateAfterSystem) {
  const auto s = after({{"a", "b", Action::propose(72)}, {"c", "d", Action::propose(38)},
                        {"e", "f", Action::propose(66)}});
  const auto msgs = build_prompt(observe(s, Role::Buyer, persona(Persona::Control)), RoundConfig{});
  for (std::size_t i = 2; i < msgs.size(); ++i) EXPECT_NE(msgs[i].role, msgs[i - 1].role);
  EXPECT_EQ(msgs.back().role, "user");
}

TEST(Prompt, WarnsNearTheTurnCap) {
  RoundConfig cfg;
  cfg.max_turns = 3;
  const auto two_left = after({{"", "", Action::propose(70)}}, cfg);
  const auto last = build_prompt(observe(two_left, Role::Buyer, persona(Persona::Control)), cfg);
  EXPECT_NE(last.back().content.find("last chance"), std::string::npos);
  const auto one_left = after({{"", "", Action::propose(70)}, {"", "", Action::propose(30)}}, cfg);
  const auto fin = build_prompt(observe(one_left, Role::Seller, persona(Persona::Control)), cfg);
  EXPECT_NE(fin.back().content.find("Final turn"), std::string::npos);
}

TEST(ParseMove, RoundTripsFormattedBlock) {
  const AgentMove move{"think\nmore", "Deal?", Action::propose(55)};
  const auto parsed = parse_move("Sure.\n" + format_move_block(move) + "\ntrailing", facing_offer(70));
  EXPECT_EQ(parsed, move);
}

TEST(ParseMove, CaseInsensitiveKeysAndActions) {
  const auto m = parse_move("```move\nAction: ACCEPT\nMessage: fine\n```", facing_offer(50));
  EXPECT_EQ(m.action, Action::accept());
  EXPECT_EQ(m.message, "fine");
}

TEST(ParseMove, Malformed) {
  const auto obs = facing_offer(50);
  EXPECT_ERRC(parse_move("I accept.", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: accept\n", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\nmessage: hi\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: haggle\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: propose\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: propose\nprice: 5.5\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: propose\nprice: 55 ZUP\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: accept\nprice: 55\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\naction: accept\naction: reject\n```", obs), Errc::MalformedReply);
  EXPECT_ERRC(parse_move("```move\nmood: great\naction: accept\n```", obs), Errc::MalformedReply);
}

TEST(ParseMove, IllegalAndOutOfRange) {
  EXPECT_ERRC(parse_move(bt::move_reply("accept"), opening()), Errc::IllegalMove);
  EXPECT_ERRC(parse_move(bt::move_reply("propose", 101), opening()), Errc::PriceOutOfRange);
  EXPECT_EQ(parse_move(bt::move_reply("propose", 100), opening()).action, Action::propose(100));
}

TEST(LlmDecide, RecoversAfterFeedback) {
  using MT = MockTransport;
  auto mock = mock_transport({MT::reply("no block here"), MT::reply(bt::move_reply("accept"))});
  const auto move = llm_decide(facing_offer(52), RoundConfig{}, *mock.gateway, endpoint(), 3);
  EXPECT_EQ(move.action, Action::accept());
  const auto reqs = mock.transport->requests();
  ASSERT_EQ(reqs.size(), 2u);
  EXPECT_NE(reqs[1].body.find("could not be used"), std::string::npos);
}

TEST(LlmDecide, IllegalMoveSpendsBudget) {
  using MT = MockTransport;
  auto mock = mock_transport({MT::reply(bt::move_reply("accept"))});
  EXPECT_ERRC(llm_decide(opening(), RoundConfig{}, *mock.gateway, endpoint(), 0),
              Errc::AgentFailure);
  EXPECT_EQ(mock.transport->requests().size(), 1u);
}

TEST(LlmDecide, GatewayFailureBecomesAgentFailure) {
  using MT = MockTransport;
  auto mock = mock_transport({MT::status(401)});
  EXPECT_ERRC(llm_decide(opening(), RoundConfig{}, *mock.gateway, endpoint(), 3),
              Errc::AgentFailure);
  auto empty = mock_transport({});
  EXPECT_ERRC(llm_decide(opening(), RoundConfig{}, *empty.gateway, endpoint(), 3),
              Errc::AgentFailure);
}
