#include <benchmark/benchmark.h>

#include "bargain/agents.hpp"
#include "bargain/tournament.hpp"

namespace {

void BM_ScriptedRound(benchmark::State& state) {
  const bargain::RoundConfig cfg;
  const auto& registry = bargain::PersonaRegistry::builtin();
  bargain::MatchSpec spec;
  spec.seller_agent.label = "a";
  spec.buyer_agent.label = "b";
  spec.seller_persona = bargain::Persona::Competitive;
  spec.buyer_persona = bargain::Persona::Cooperative;
  bargain::ScriptedAgent seller(
      bargain::scripted_preset(spec.seller_persona, bargain::Role::Seller, cfg));
  bargain::ScriptedAgent buyer(
      bargain::scripted_preset(spec.buyer_persona, bargain::Role::Buyer, cfg));
  const bargain::Timestamp now = [] { return std::string("0"); };
  for (auto _ : state) {
    auto played = bargain::play_round(spec, cfg, seller, buyer, registry, now);
    benchmark::DoNotOptimize(played);
  }
}
BENCHMARK(BM_ScriptedRound);

void BM_Tournament(benchmark::State& state) {
  std::vector<bargain::AgentDescriptor> models(2);
  models[0].label = "m0";
  models[1].label = "m1";
  models[1].variant.anchor_offset = 1;
  const auto specs = bargain::expand_matrix(models, bargain::kAllPersonas, 1, 3);
  bargain::TournamentOptions options;
  options.parallelism = static_cast<int>(state.range(0));
  options.now = [] { return std::string("0"); };
  for (auto _ : state) {
    auto results = bargain::run_tournament(specs, options);
    benchmark::DoNotOptimize(results);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(specs.size()));
}
BENCHMARK(BM_Tournament)->Arg(1)->Arg(4);

}  // namespace
