#include "bargain/tournament.hpp"

#include <atomic>
#include <set>

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace bargain;
namespace bt = bargain::testing;

namespace {

const Timestamp kFixedClock = [] { return std::string("2000-01-01T00:00:00.000Z"); };

std::vector<MatchSpec> small_matrix(int reps = 1) {
  const auto models = bt::scripted_models(2);
  const std::vector<Persona> personas{Persona::Competitive, Persona::Cooperative};
  return expand_matrix(models, personas, reps, 42);
}

TournamentOptions options(int parallelism = 1) {
  TournamentOptions o;
  o.parallelism = parallelism;
  o.now = kFixedClock;
  return o;
}

}  // namespace

TEST(Matrix, NestingOrderAndSize) {
  const auto specs = small_matrix(3);
  ASSERT_EQ(specs.size(), 2u * 2u * 2u * 2u * 3u);
  for (std::size_t i = 0; i < specs.size(); ++i) EXPECT_EQ(specs[i].index, i);
  EXPECT_EQ(specs[0].seller_agent.label, "scripted-0");
  EXPECT_EQ(specs[0].repetition, 0);
  EXPECT_EQ(specs[1].repetition, 1);
  EXPECT_EQ(specs[3].buyer_persona, Persona::Cooperative);
  EXPECT_EQ(specs[6].seller_persona, Persona::Cooperative);
  EXPECT_EQ(specs[12].buyer_agent.label, "scripted-1");
  EXPECT_EQ(specs[24].seller_agent.label, "scripted-1");
  EXPECT_EQ(specs[0].round_id(), "R000000");
  EXPECT_EQ(specs[47].round_id(), "R000047");
}

TEST(Matrix, SeedsAreDerivedAndDistinct) {
  const auto specs = small_matrix(3);
  std::set<std::uint64_t> seeds;
  for (const auto& s : specs) {
    EXPECT_EQ(s.seed, derive_seed(42, s.index));
    seeds.insert(s.seed);
  }
  EXPECT_EQ(seeds.size(), specs.size());
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Matrix, EmptyAxes) {
  const auto models = bt::scripted_models(1);
  const std::vector<Persona> none;
  EXPECT_ERRC(expand_matrix({}, kAllPersonas, 1, 0), Errc::EmptyAxis);
  EXPECT_ERRC(expand_matrix(models, none, 1, 0), Errc::EmptyAxis);
  EXPECT_ERRC(expand_matrix(models, kAllPersonas, 0, 0), Errc::EmptyAxis);
}

TEST(Descriptor, Validation) {
  AgentDescriptor a;
  EXPECT_ERRC(a.validate(), Errc::InvalidConfig);  // empty label
  a.label = "has,comma";
  EXPECT_ERRC(a.validate(), Errc::InvalidConfig);
  a.label = "ok";
  EXPECT_NO_THROW(a.validate());
  a.kind = AgentDescriptor::Kind::Llm;
  EXPECT_ERRC(a.validate(), Errc::InvalidConfig);  // no endpoint
}

TEST(PlayRound, ProducesConsistentRecord) {
  const auto spec = small_matrix()[0];
  const RoundConfig cfg;
  ScriptedAgent seller(scripted_preset(spec.seller_persona, Role::Seller, cfg));
  ScriptedAgent buyer(scripted_preset(spec.buyer_persona, Role::Buyer, cfg));
  const auto played =
      play_round(spec, cfg, seller, buyer, PersonaRegistry::builtin(), kFixedClock);
  EXPECT_NO_THROW(validate_record(played.record));
  EXPECT_EQ(played.record.round_id, "R000000");
  EXPECT_EQ(played.record.turns_used, static_cast<int>(played.transcript.turns.size()));
  EXPECT_EQ(played.transcript.outcome().winner, played.record.winner);
  EXPECT_EQ(played.transcript.started_at, "2000-01-01T00:00:00.000Z");
  EXPECT_EQ(replay(played.transcript).final_price, played.record.final_price);
  EXPECT_NO_THROW(verify_replay(played.transcript));
}

TEST(PlayRound, AgentFailureIsWrapped) {
  const auto spec = small_matrix()[0];
  bt::FailingAgent bad;
  ScriptedAgent good(scripted_preset(Persona::Control, Role::Buyer, RoundConfig{}));
  EXPECT_ERRC(play_round(spec, RoundConfig{}, bad, good, PersonaRegistry::builtin(), kFixedClock),
              Errc::AgentFailure);
}

TEST(Replay, DetectsTampering) {
  const auto spec = small_matrix()[0];
  const RoundConfig cfg;
  ScriptedAgent seller(scripted_preset(Persona::Competitive, Role::Seller, cfg));
  ScriptedAgent buyer(scripted_preset(Persona::Cooperative, Role::Buyer, cfg));
  auto doc = play_round(spec, cfg, seller, buyer, PersonaRegistry::builtin(), kFixedClock).transcript;
  auto changed_price = doc;
  ASSERT_TRUE(changed_price.record.final_price);
  changed_price.record.final_price = *changed_price.record.final_price + 1;
  EXPECT_ERRC(verify_replay(changed_price), Errc::ReplayMismatch);
  auto bad_action = doc;
  bad_action.turns[0].action = Action::accept();
  EXPECT_ERRC(replay(bad_action), Errc::ReplayMismatch);
}

TEST(Fingerprint, ChangesWithInputs) {
  const auto spec = small_matrix()[0];
  const RoundConfig cfg;
  const auto& reg = PersonaRegistry::builtin();
  const auto base = round_fingerprint(spec, cfg, reg);
  EXPECT_EQ(base, round_fingerprint(spec, cfg, reg));
  auto other = spec;
  other.seller_persona = Persona::Selfish;
  EXPECT_NE(base, round_fingerprint(other, cfg, reg));
  auto cfg2 = cfg;
  cfg2.max_turns = 12;
  EXPECT_NE(base, round_fingerprint(spec, cfg2, reg));
  other = spec;
  other.seller_agent.variant.anchor_offset = 9;
  EXPECT_NE(base, round_fingerprint(other, cfg, reg));
}

TEST(Tournament, ParallelMatchesSequential) {
  const auto specs = small_matrix(2);
  const auto a = run_tournament(specs, options(1));
  const auto b = run_tournament(specs, options(4));
  ASSERT_EQ(a.records.size(), specs.size());
  EXPECT_EQ(a.records, b.records);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].round_id, specs[i].round_id());
  }
}

TEST(Tournament, FailuresAreIsolated) {
  const auto specs = small_matrix();
  auto opts = options(3);
  const auto inner = default_agent_factory(nullptr);
  opts.factory = [&](const AgentDescriptor& d, Role role, Persona p, const MatchSpec& spec,
                     const RoundConfig& cfg) -> std::unique_ptr<Agent> {
    if (spec.index % 5 == 2 && role == Role::Buyer) return std::make_unique<bt::FailingAgent>();
    return inner(d, role, p, spec, cfg);
  };
  std::atomic<std::size_t> last_done{0};
  opts.progress = [&](std::size_t done, std::size_t) { last_done = done; };
  const auto res = run_tournament(specs, opts);
  EXPECT_EQ(res.records.size() + res.aborts.size(), specs.size());
  EXPECT_EQ(res.aborts.size(), 3u);  // indices 2, 7, 12
  for (const auto& a : res.aborts) {
    EXPECT_EQ(a.spec_index % 5, 2u);
    EXPECT_NE(a.error.find("scripted failure"), std::string::npos);
  }
  EXPECT_EQ(last_done.load(), specs.size());
  const auto draws = aborts_as_draws(res.aborts, 50);
  ASSERT_EQ(draws.size(), res.aborts.size());
  EXPECT_EQ(draws[0].winner, Winner::Draw);
  EXPECT_EQ(draws[0].turns_used, 0);
  EXPECT_NO_THROW(validate_record(draws[0]));
}

TEST(Tournament, LlmSeatsUseGatewayScript) {
  using MT = MockTransport;
  std::vector<MT::Canned> script{MT::reply(bt::move_reply("propose", 70)),
                                 MT::reply(bt::move_reply("accept"))};
  auto mock = mock_transport(script);
  AgentDescriptor llm;
  llm.label = "mock-llm";
  llm.kind = AgentDescriptor::Kind::Llm;
  llm.endpoint = ModelEndpoint{};
  llm.endpoint->model_id = "mock";
  MatchSpec spec;
  spec.seller_agent = llm;
  spec.buyer_agent = llm;
  auto opts = options();
  opts.factory = default_agent_factory(mock.gateway);
  const std::vector<MatchSpec> specs{spec};
  const auto res = run_tournament(specs, opts);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].final_price, 70);
  EXPECT_EQ(res.records[0].winner, Winner::SellerWin);
  EXPECT_EQ(mock.transport->remaining(), 0u);
}

TEST(Records, ValidateCatchesContradictions) {
  RoundRecord r;
  r.round_id = "R000001";
  r.seller_model = "a";
  r.buyer_model = "b";
  r.end_reason = EndReason::Agreement;
  r.final_price = 55;
  r.winner = Winner::SellerWin;
  r.turns_used = 2;
  EXPECT_NO_THROW(validate_record(r));
  auto w = r;
  w.winner = Winner::BuyerWin;
  EXPECT_ERRC(validate_record(w), Errc::CorruptRow);
  auto t = r;
  t.turns_used = 1;
  EXPECT_ERRC(validate_record(t), Errc::CorruptRow);
  auto p = r;
  p.end_reason = EndReason::Rejected;
  EXPECT_ERRC(validate_record(p), Errc::CorruptRow);
}

TEST(Timestamps, UtcNowShape) {
  const auto t = utc_now();
  ASSERT_EQ(t.size(), 24u);
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
  EXPECT_EQ(t[19], '.');
}
