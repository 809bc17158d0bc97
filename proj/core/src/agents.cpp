#include "bargain/agents.hpp"

#include <algorithm>
#include <array>

#include "bargain/error.hpp"
#include "bargain/hash.hpp"

namespace bargain {

namespace {

// Offsets are relative to the win baseline.
struct PresetRow {
  int open_offset;
  int step;
  int reserve_offset;
  int threshold_offset;
};

// Indexed by Persona. Seller anchors sit above the baseline and fall; buyer
// anchors sit below it and rise.
constexpr std::array<PresetRow, kPersonaCount> kSellerPresets{{
    {+12, 6, -9, +3},   // Cooperative
    {+35, 11, -6, +6},  // Competitive
    {+8, 5, -10, +2},   // Altruistic
    {+26, 9, -7, +5},   // Selfish
    {+30, 10, -7, +5},  // Cunning
    {+17, 7, -8, +4},   // Desperate
    {+20, 7, -8, +4},   // Control
}};

constexpr std::array<PresetRow, kPersonaCount> kBuyerPresets{{
    {-12, 7, +8, 0},    // Cooperative
    {-35, 15, +8, -2},  // Competitive
    {-8, 6, +8, 0},     // Altruistic
    {-26, 12, +8, -1},  // Selfish
    {-30, 13, +8, -2},  // Cunning
    {-17, 9, +8, -1},   // Desperate
    {-20, 10, +8, -1},  // Control
}};

bool meets_threshold(Role role, int offer, int threshold) {
  return role == Role::Seller ? offer >= threshold : offer <= threshold;
}

}  // namespace

Observation observe(const NegotiationState& state, Role role, const PersonaSpec& persona) {
  const auto& config = state.config();
  Observation obs;
  obs.role = role;
  obs.private_valuation = role == Role::Seller ? config.seller_cost : config.buyer_limit;
  obs.persona = persona;
  obs.turns_remaining = state.turns_remaining();
  obs.price_min = config.price_min;
  obs.price_max = config.price_max;
  obs.legal = state.next_actor() == role ? legal_actions(state) : ActionSet{};
  for (const auto& turn : state.transcript()) {
    obs.public_transcript.push_back({turn.turn_index, turn.actor, turn.message, turn.action});
    if (turn.actor == role) obs.own_reasoning.push_back(turn.reasoning);
  }
  if (const auto& offer = state.standing_offer(); offer && offer->proposer != role) {
    obs.standing_offer = offer->price;
  }
  return obs;
}

void validate_policy(const ScriptedPolicy& policy, Role role, const RoundConfig& config) {
  if (policy.step < 0) throw Error(Errc::InvalidConfig, "scripted step must be >= 0");
  if (role == Role::Seller && policy.reserve < config.seller_cost) {
    throw Error(Errc::InvalidConfig, "seller reserve below production cost");
  }
  if (role == Role::Buyer && policy.reserve > config.buyer_limit) {
    throw Error(Errc::InvalidConfig, "buyer reserve above payment limit");
  }
}

AgentMove scripted_decide(const ScriptedPolicy& policy, const Observation& obs) {
  const Role role = obs.role;
  if (obs.standing_offer && obs.legal.contains(ActionKind::Accept)) {
    const int offer = *obs.standing_offer;
    if (meets_threshold(role, offer, policy.accept_threshold)) {
      return {"Offer " + std::to_string(offer) + " meets my threshold " +
                  std::to_string(policy.accept_threshold) + ".",
              "Agreed at " + std::to_string(offer) + ".", Action::accept()};
    }
    if (policy.reject_on_final_turn && obs.turns_remaining <= 2 &&
        obs.legal.contains(ActionKind::Reject)) {
      return {"Last own turn and " + std::to_string(offer) + " is still unacceptable.",
              "I cannot accept that.", Action::reject()};
    }
  }

  const int conceded = policy.step * obs.own_turns_taken();
  int price = role == Role::Seller ? std::max(policy.open_price - conceded, policy.reserve)
                                   : std::min(policy.open_price + conceded, policy.reserve);
  price = std::clamp(price, obs.price_min, obs.price_max);
  std::string reasoning = obs.own_turns_taken() == 0
                              ? "Opening anchor at " + std::to_string(price) + "."
                              : "Conceding to " + std::to_string(price) + ".";
  return {std::move(reasoning), "I can do " + std::to_string(price) + ".",
          Action::propose(price)};
}

ScriptedPolicy scripted_preset(Persona persona, Role role, const RoundConfig& config,
                               const ScriptedVariant& variant, std::uint64_t seed) {
  const auto& row = (role == Role::Seller ? kSellerPresets : kBuyerPresets)
      [static_cast<std::size_t>(persona)];
  const int base = config.win_baseline;
  int noise = 0;
  if (variant.jitter > 0) {
    const auto span = static_cast<std::uint64_t>(2 * variant.jitter + 1);
    const auto salt = role == Role::Seller ? 0x5e11e5ULL : 0xb0b3e5ULL;
    noise = static_cast<int>(splitmix64(seed ^ salt) % span) - variant.jitter;
  }
  ScriptedPolicy policy;
  policy.step = row.step;
  policy.accept_threshold = base + row.threshold_offset;
  if (role == Role::Seller) {
    policy.open_price = base + row.open_offset + variant.anchor_offset + noise;
    policy.reserve = std::max(base + row.reserve_offset, config.seller_cost);
  } else {
    policy.open_price = base + row.open_offset - variant.anchor_offset + noise;
    policy.reserve = std::min(base + row.reserve_offset, config.buyer_limit);
  }
  policy.open_price = std::clamp(policy.open_price, config.price_min, config.price_max);
  return policy;
}

AgentMove ScriptedAgent::decide(const Observation& observation, const RoundConfig& /*config*/) {
  return scripted_decide(policy_, observation);
}

LlmAgent::LlmAgent(std::shared_ptr<ChatGateway> gateway, ModelEndpoint endpoint,
                   int retry_budget, PromptOptions options)
    : gateway_(std::move(gateway)),
      endpoint_(std::move(endpoint)),
      retry_budget_(retry_budget),
      options_(options) {
  if (!gateway_) throw Error(Errc::InvalidConfig, "LLM agent needs a gateway");
  if (retry_budget_ < 0) throw Error(Errc::InvalidConfig, "retry budget must be >= 0");
}

AgentMove LlmAgent::decide(const Observation& observation, const RoundConfig& config) {
  return llm_decide(observation, config, *gateway_, endpoint_, retry_budget_, options_);
}

}  // namespace bargain
