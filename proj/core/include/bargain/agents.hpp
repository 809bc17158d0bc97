#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bargain/engine.hpp"
#include "bargain/llm_gateway.hpp"
#include "bargain/personas.hpp"

namespace bargain {

struct PublicTurn {
  int turn_index = 0;
  Role actor = Role::Seller;
  std::string message;
  Action action;
};

// What one role is allowed to see when it is about to move.
struct Observation {
  Role role = Role::Seller;
  int private_valuation = 0;  // seller_cost for the seller, buyer_limit for the buyer
  PersonaSpec persona;
  std::vector<PublicTurn> public_transcript;
  std::vector<std::string> own_reasoning;  // this role's earlier reasoning, oldest first
  int turns_remaining = 0;
  ActionSet legal;
  int price_min = 0;
  int price_max = 0;
  std::optional<int> standing_offer;  // the opponent's live proposal

  int own_turns_taken() const { return static_cast<int>(own_reasoning.size()); }
};

Observation observe(const NegotiationState& state, Role role, const PersonaSpec& persona);

struct AgentMove {
  std::string reasoning;
  std::string message;
  Action action;

  friend bool operator==(const AgentMove&, const AgentMove&) = default;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentMove decide(const Observation& observation, const RoundConfig& config) = 0;
};

// ---------------------------------------------------------------------------
// Scripted agents

// Linear concession schedule. For the seller `reserve` is a floor and offers
// move down; for the buyer it is a cap and offers move up.
struct ScriptedPolicy {
  int open_price = 0;
  int step = 0;
  int reserve = 0;
  int accept_threshold = 0;
  bool reject_on_final_turn = false;

  friend bool operator==(const ScriptedPolicy&, const ScriptedPolicy&) = default;
};

// Throws Error(InvalidConfig) if the policy breaks the role's valuation bound.
void validate_policy(const ScriptedPolicy& policy, Role role, const RoundConfig& config);

// Pure: same policy and observation give the same move.
AgentMove scripted_decide(const ScriptedPolicy& policy, const Observation& observation);

// Per-model knobs for scripted presets.
struct ScriptedVariant {
  int anchor_offset = 0;  // added to the seller anchor, subtracted from the buyer's
  int jitter = 2;         // seeded uniform noise on the anchor, in [-jitter, jitter]

  friend bool operator==(const ScriptedVariant&, const ScriptedVariant&) = default;
};

// Persona presets. Aggressive personas anchor further from the baseline and
// hold out for better terms.
ScriptedPolicy scripted_preset(Persona persona, Role role, const RoundConfig& config,
                               const ScriptedVariant& variant = {}, std::uint64_t seed = 0);

class ScriptedAgent final : public Agent {
 public:
  explicit ScriptedAgent(ScriptedPolicy policy) : policy_(policy) {}
  AgentMove decide(const Observation& observation, const RoundConfig& config) override;
  const ScriptedPolicy& policy() const { return policy_; }

 private:
  ScriptedPolicy policy_;
};

// ---------------------------------------------------------------------------
// LLM agents

struct PromptOptions {
  PromptMode persona_mode = PromptMode::AllVariants;
  std::uint64_t rotation_index = 0;
};

std::vector<ChatMessage> build_prompt(const Observation& observation, const RoundConfig& config,
                                      const PromptOptions& options = {});

// Serializes a move as the fenced reply block models are asked to produce.
std::string format_move_block(const AgentMove& move);

// Throws Error(MalformedReply | IllegalMove | PriceOutOfRange).
AgentMove parse_move(std::string_view raw, const Observation& observation);

// Calls the model, re-asking with the parse error up to `retry_budget` more
// times. Throws Error(AgentFailure) once the budget is spent or the gateway fails.
AgentMove llm_decide(const Observation& observation, const RoundConfig& config,
                     ChatGateway& gateway, const ModelEndpoint& endpoint, int retry_budget,
                     const PromptOptions& options = {});

class LlmAgent final : public Agent {
 public:
  LlmAgent(std::shared_ptr<ChatGateway> gateway, ModelEndpoint endpoint, int retry_budget = 3,
           PromptOptions options = {});
  AgentMove decide(const Observation& observation, const RoundConfig& config) override;

 private:
  std::shared_ptr<ChatGateway> gateway_;
  ModelEndpoint endpoint_;
  int retry_budget_;
  PromptOptions options_;
};

}  // namespace bargain
