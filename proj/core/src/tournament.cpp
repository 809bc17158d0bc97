#include "bargain/tournament.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "bargain/error.hpp"
#include "bargain/hash.hpp"

namespace bargain {

namespace {

using json = nlohmann::json;

json descriptor_json(const AgentDescriptor& agent) {
  json j{{"label", agent.label}};
  if (agent.kind == AgentDescriptor::Kind::Scripted) {
    j["kind"] = "scripted";
    j["anchor_offset"] = agent.variant.anchor_offset;
    j["jitter"] = agent.variant.jitter;
  } else {
    const auto& ep = *agent.endpoint;
    j["kind"] = "llm";
    j["base_url"] = ep.base_url;
    j["model_id"] = ep.model_id;
    j["temperature"] = ep.temperature;
    j["max_reply_tokens"] = ep.max_reply_tokens;
    j["retry_budget"] = agent.retry_budget;
    j["persona_mode"] = agent.persona_mode == PromptMode::Rotate ? "rotate" : "all";
  }
  return j;
}

json config_json(const RoundConfig& c) {
  return {{"item_name", c.item_name},     {"currency_name", c.currency_name},
          {"seller_cost", c.seller_cost}, {"buyer_limit", c.buyer_limit},
          {"win_baseline", c.win_baseline}, {"max_turns", c.max_turns},
          {"price_min", c.price_min},     {"price_max", c.price_max}};
}

void add_agent_metadata(std::map<std::string, std::string>& meta, std::string_view side,
                        const AgentDescriptor& agent) {
  const std::string prefix(side);
  meta[prefix + "_kind"] = agent.kind == AgentDescriptor::Kind::Scripted ? "scripted" : "llm";
  if (agent.endpoint) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", agent.endpoint->temperature);
    meta[prefix + "_model_id"] = agent.endpoint->model_id;
    meta[prefix + "_temperature"] = buf;
    meta[prefix + "_max_reply_tokens"] = std::to_string(agent.endpoint->max_reply_tokens);
  }
}

}  // namespace

void AgentDescriptor::validate() const {
  if (label.empty()) throw Error(Errc::InvalidConfig, "agent label is empty");
  if (label.find_first_of(",\"\n\r|") != std::string::npos) {
    throw Error(Errc::InvalidConfig, "agent label '" + label + "' contains , \" | or a newline");
  }
  if (kind == Kind::Llm) {
    if (!endpoint) throw Error(Errc::InvalidConfig, "LLM agent '" + label + "' has no endpoint");
    endpoint->validate();
    if (retry_budget < 0) throw Error(Errc::InvalidConfig, "retry budget must be >= 0");
  } else if (variant.jitter < 0) {
    throw Error(Errc::InvalidConfig, "scripted jitter must be >= 0");
  }
}

std::string MatchSpec::round_id() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%06zu", index);
  return buf;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t index) noexcept {
  return splitmix64(splitmix64(base_seed) ^ static_cast<std::uint64_t>(index));
}

std::vector<MatchSpec> expand_matrix(std::span<const AgentDescriptor> models,
                                     std::span<const Persona> personas, int repetitions,
                                     std::uint64_t base_seed) {
  if (models.empty()) throw Error(Errc::EmptyAxis, "model list is empty");
  if (personas.empty()) throw Error(Errc::EmptyAxis, "persona list is empty");
  if (repetitions < 1) throw Error(Errc::EmptyAxis, "repetitions must be >= 1");
  for (const auto& m : models) m.validate();

  std::vector<MatchSpec> specs;
  specs.reserve(models.size() * models.size() * personas.size() * personas.size() *
                static_cast<std::size_t>(repetitions));
  for (const auto& seller : models) {
    for (const auto& buyer : models) {
      for (auto sp : personas) {
        for (auto bp : personas) {
          for (int rep = 0; rep < repetitions; ++rep) {
            MatchSpec spec;
            spec.index = specs.size();
            spec.seller_agent = seller;
            spec.buyer_agent = buyer;
            spec.seller_persona = sp;
            spec.buyer_persona = bp;
            spec.repetition = rep;
            spec.seed = derive_seed(base_seed, spec.index);
            specs.push_back(std::move(spec));
          }
        }
      }
    }
  }
  return specs;
}

void validate_record(const RoundRecord& r) {
  const auto bad = [&](const std::string& why) {
    throw Error(Errc::CorruptRow, r.round_id + ": " + why);
  };
  if (r.round_id.empty()) bad("empty round_id");
  if (r.seller_model.empty() || r.buyer_model.empty()) bad("empty model label");
  if (r.turns_used < 0) bad("negative turns_used");
  const bool agreement = r.end_reason == EndReason::Agreement;
  if (agreement != r.final_price.has_value()) {
    bad(agreement ? "agreement without final_price" : "final_price on a round without agreement");
  }
  if (!agreement && r.winner != Winner::Draw) bad("winner set on a round without agreement");
  if (agreement) {
    if (r.turns_used < 2) bad("agreement needs at least two turns");
    const Winner expected = classify_outcome(r.end_reason, r.final_price, r.win_baseline);
    if (expected != r.winner) {
      bad("winner " + std::string(to_string(r.winner)) + " contradicts price " +
          std::to_string(*r.final_price));
    }
  }
}

RoundOutcome TranscriptDocument::outcome() const {
  return {record.end_reason, record.final_price, record.winner, record.turns_used};
}

RoundOutcome replay(const TranscriptDocument& doc) {
  try {
    auto state = new_round(doc.config);
    for (const auto& turn : doc.turns) {
      if (turn.turn_index != static_cast<int>(state.transcript().size()) + 1) {
        throw Error(Errc::ReplayMismatch, "turn index " + std::to_string(turn.turn_index) +
                                              " out of sequence");
      }
      state = apply_action(std::move(state), turn.actor, turn.reasoning, turn.message,
                           turn.action);
    }
    auto outcome = state.outcome();
    if (!outcome) throw Error(Errc::ReplayMismatch, "transcript ends with the round still open");
    return *outcome;
  } catch (const Error& e) {
    if (e.code() == Errc::ReplayMismatch) throw;
    throw Error(Errc::ReplayMismatch, doc.record.round_id + ": engine refused replay: " + e.what());
  }
}

void verify_replay(const TranscriptDocument& doc) {
  const auto got = replay(doc);
  const auto want = doc.outcome();
  if (got == want) return;
  const auto price = [](const std::optional<int>& p) {
    return p ? std::to_string(*p) : std::string("none");
  };
  throw Error(Errc::ReplayMismatch,
              doc.record.round_id + ": stored " + std::string(to_string(want.end_reason)) +
                  "/price " + price(want.final_price) + "/" + std::string(to_string(want.winner)) +
                  "/" + std::to_string(want.turns_used) + " turns, replayed " +
                  std::string(to_string(got.end_reason)) + "/price " + price(got.final_price) +
                  "/" + std::string(to_string(got.winner)) + "/" +
                  std::to_string(got.turns_used) + " turns");
}

std::string round_fingerprint(const MatchSpec& spec, const RoundConfig& config,
                              const PersonaRegistry& registry) {
  const auto persona_json = [&](Persona p) {
    const auto& s = registry.get(p);
    return json{{"name", to_string(s.name)}, {"variants", s.prompt_variants}};
  };
  const json doc{{"config", config_json(config)},
                 {"seller", descriptor_json(spec.seller_agent)},
                 {"buyer", descriptor_json(spec.buyer_agent)},
                 {"seller_persona", persona_json(spec.seller_persona)},
                 {"buyer_persona", persona_json(spec.buyer_persona)}};
  return to_hex(fnv1a64(doc.dump()));
}

std::string utc_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(ms));
  return buf;
}

PlayedRound play_round(const MatchSpec& spec, const RoundConfig& config, Agent& seller,
                       Agent& buyer, const PersonaRegistry& registry, const Timestamp& now) {
  PlayedRound out;
  auto& doc = out.transcript;
  doc.config = config;
  doc.started_at = now ? now() : std::string();

  const PersonaSpec& seller_persona = registry.get(spec.seller_persona);
  const PersonaSpec& buyer_persona = registry.get(spec.buyer_persona);

  auto state = new_round(config);
  while (state.is_open()) {
    const Role role = state.next_actor();
    Agent& agent = role == Role::Seller ? seller : buyer;
    const auto& label = role == Role::Seller ? spec.seller_agent.label : spec.buyer_agent.label;
    auto obs = observe(state, role, role == Role::Seller ? seller_persona : buyer_persona);
    AgentMove move;
    try {
      move = agent.decide(obs, config);
      if (!obs.legal.contains(move.action.kind)) {
        throw Error(Errc::IllegalMove, std::string(to_string(move.action.kind)) + " is not legal");
      }
      state = apply_action(std::move(state), role, std::move(move.reasoning),
                           std::move(move.message), move.action);
    } catch (const Error& e) {
      if (e.code() == Errc::AgentFailure) throw;
      throw Error(Errc::AgentFailure, std::string(to_string(role)) + " agent '" + label +
                                          "' failed on turn " +
                                          std::to_string(state.transcript().size() + 1) + ": " +
                                          e.what());
    }
  }

  const auto outcome = *state.outcome();
  auto& r = out.record;
  r.round_id = spec.round_id();
  r.seller_model = spec.seller_agent.label;
  r.buyer_model = spec.buyer_agent.label;
  r.seller_persona = spec.seller_persona;
  r.buyer_persona = spec.buyer_persona;
  r.repetition = spec.repetition;
  r.seed = spec.seed;
  r.end_reason = outcome.end_reason;
  r.final_price = outcome.final_price;
  r.winner = outcome.winner;
  r.turns_used = outcome.turns_used;
  r.win_baseline = config.win_baseline;
  r.fingerprint = round_fingerprint(spec, config, registry);

  doc.record = r;
  doc.turns = state.transcript();
  doc.finished_at = now ? now() : std::string();
  doc.metadata["spec_index"] = std::to_string(spec.index);
  add_agent_metadata(doc.metadata, "seller", spec.seller_agent);
  add_agent_metadata(doc.metadata, "buyer", spec.buyer_agent);
  return out;
}

AgentFactory default_agent_factory(std::shared_ptr<ChatGateway> gateway) {
  return [gateway = std::move(gateway)](const AgentDescriptor& agent, Role role, Persona persona,
                                        const MatchSpec& spec,
                                        const RoundConfig& config) -> std::unique_ptr<Agent> {
    if (agent.kind == AgentDescriptor::Kind::Scripted) {
      const auto salt = role == Role::Seller ? 0x51ULL : 0xb1ULL;
      auto policy =
          scripted_preset(persona, role, config, agent.variant, splitmix64(spec.seed ^ salt));
      validate_policy(policy, role, config);
      return std::make_unique<ScriptedAgent>(policy);
    }
    if (!gateway) {
      throw Error(Errc::InvalidConfig, "LLM agent '" + agent.label + "' needs a gateway");
    }
    PromptOptions options;
    options.persona_mode = agent.persona_mode;
    options.rotation_index = spec.seed;
    return std::make_unique<LlmAgent>(gateway, *agent.endpoint, agent.retry_budget, options);
  };
}

std::vector<RoundRecord> aborts_as_draws(std::span<const AbortEntry> aborts, int win_baseline) {
  std::vector<RoundRecord> out;
  out.reserve(aborts.size());
  for (const auto& a : aborts) {
    RoundRecord r;
    r.round_id = a.round_id;
    r.seller_model = a.seller_model;
    r.buyer_model = a.buyer_model;
    r.seller_persona = a.seller_persona;
    r.buyer_persona = a.buyer_persona;
    r.seed = a.seed;
    r.end_reason = EndReason::TurnLimit;
    r.winner = Winner::Draw;
    r.turns_used = 0;
    r.win_baseline = win_baseline;
    r.fingerprint = "aborted";
    out.push_back(std::move(r));
  }
  return out;
}

TournamentResults run_tournament(std::span<const MatchSpec> specs,
                                 const TournamentOptions& options) {
  if (options.parallelism < 1) throw Error(Errc::InvalidConfig, "parallelism must be >= 1");
  options.config.validate();
  const PersonaRegistry& registry =
      options.registry ? *options.registry : PersonaRegistry::builtin();
  const AgentFactory factory =
      options.factory ? options.factory : default_agent_factory(nullptr);

  std::vector<std::optional<PlayedRound>> played(specs.size());
  std::vector<std::optional<AbortEntry>> aborted(specs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;

  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < specs.size(); i = next.fetch_add(1)) {
      const auto& spec = specs[i];
      try {
        auto seller = factory(spec.seller_agent, Role::Seller, spec.seller_persona, spec,
                              options.config);
        auto buyer =
            factory(spec.buyer_agent, Role::Buyer, spec.buyer_persona, spec, options.config);
        played[i] = play_round(spec, options.config, *seller, *buyer, registry, options.now);
      } catch (const std::exception& e) {
        aborted[i] = AbortEntry{spec.round_id(),      spec.index,          spec.seller_agent.label,
                                spec.buyer_agent.label, spec.seller_persona, spec.buyer_persona,
                                spec.seed,            e.what()};
      }
      const auto finished = done.fetch_add(1) + 1;
      if (options.progress) {
        std::lock_guard lock(progress_mu);
        options.progress(finished, specs.size());
      }
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(options.parallelism),
                                             std::max<std::size_t>(specs.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  TournamentResults results;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (played[i]) {
      results.records.push_back(std::move(played[i]->record));
      results.transcripts.push_back(std::move(played[i]->transcript));
    } else if (aborted[i]) {
      results.aborts.push_back(std::move(*aborted[i]));
    }
  }
  return results;
}

}  // namespace bargain
