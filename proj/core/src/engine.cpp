#include "bargain/engine.hpp"

#include <utility>

#include "bargain/error.hpp"

namespace bargain {

std::string_view to_string(Role role) noexcept {
  return role == Role::Seller ? "seller" : "buyer";
}

std::string_view to_string(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::Propose: return "propose";
    case ActionKind::Accept: return "accept";
    case ActionKind::Reject: return "reject";
  }
  return "?";
}

std::string_view to_string(EndReason reason) noexcept {
  switch (reason) {
    case EndReason::Agreement: return "agreement";
    case EndReason::Rejected: return "rejected";
    case EndReason::TurnLimit: return "turn_limit";
  }
  return "?";
}

std::string_view to_string(Winner winner) noexcept {
  switch (winner) {
    case Winner::SellerWin: return "seller";
    case Winner::BuyerWin: return "buyer";
    case Winner::Draw: return "draw";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  if (text == "seller") return Role::Seller;
  if (text == "buyer") return Role::Buyer;
  return std::nullopt;
}

std::optional<ActionKind> parse_action_kind(std::string_view text) noexcept {
  if (text == "propose") return ActionKind::Propose;
  if (text == "accept") return ActionKind::Accept;
  if (text == "reject") return ActionKind::Reject;
  return std::nullopt;
}

std::optional<EndReason> parse_end_reason(std::string_view text) noexcept {
  if (text == "agreement") return EndReason::Agreement;
  if (text == "rejected") return EndReason::Rejected;
  if (text == "turn_limit") return EndReason::TurnLimit;
  return std::nullopt;
}

std::optional<Winner> parse_winner(std::string_view text) noexcept {
  if (text == "seller") return Winner::SellerWin;
  if (text == "buyer") return Winner::BuyerWin;
  if (text == "draw") return Winner::Draw;
  return std::nullopt;
}

std::string to_string(const Action& action) {
  std::string out(to_string(action.kind));
  if (action.price) out += " " + std::to_string(*action.price);
  return out;
}

std::vector<ActionKind> ActionSet::kinds() const {
  std::vector<ActionKind> out;
  for (auto kind : {ActionKind::Propose, ActionKind::Accept, ActionKind::Reject}) {
    if (contains(kind)) out.push_back(kind);
  }
  return out;
}

void RoundConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(Errc::InvalidConfig, why); };
  if (!(seller_cost < win_baseline && win_baseline < buyer_limit)) {
    fail("require seller_cost < win_baseline < buyer_limit, got " + std::to_string(seller_cost) +
         " / " + std::to_string(win_baseline) + " / " + std::to_string(buyer_limit));
  }
  if (max_turns < 2) fail("max_turns must be >= 2, got " + std::to_string(max_turns));
  if (price_min > seller_cost) fail("price_min must not exceed seller_cost");
  if (buyer_limit > price_max) fail("buyer_limit must not exceed price_max");
}

std::optional<RoundOutcome> NegotiationState::outcome() const {
  if (!end_reason_) return std::nullopt;
  RoundOutcome out;
  out.end_reason = *end_reason_;
  out.turns_used = static_cast<int>(transcript_.size());
  if (*end_reason_ == EndReason::Agreement) {
    // Accept is always the last record and binds to the proposal before it.
    out.final_price = transcript_[transcript_.size() - 2].action.price;
  }
  out.winner = classify_outcome(out.end_reason, out.final_price, config_.win_baseline);
  return out;
}

NegotiationState new_round(const RoundConfig& config) {
  config.validate();
  NegotiationState state;
  state.config_ = config;
  state.transcript_.reserve(static_cast<std::size_t>(config.max_turns));
  return state;
}

ActionSet legal_actions(const NegotiationState& state) noexcept {
  if (!state.is_open()) return {};
  if (!state.standing_offer()) return {ActionKind::Propose};
  return {ActionKind::Propose, ActionKind::Accept, ActionKind::Reject};
}

NegotiationState apply_action(NegotiationState state, Role actor, std::string reasoning,
                              std::string message, Action action) {
  if (!state.is_open()) {
    throw Error(Errc::IllegalAction, "round is closed");
  }
  if (actor != state.next_actor()) {
    throw Error(Errc::OutOfTurn, "expected " + std::string(to_string(state.next_actor())) +
                                     ", got " + std::string(to_string(actor)));
  }
  if (!legal_actions(state).contains(action.kind)) {
    throw Error(Errc::IllegalAction,
                std::string(to_string(action.kind)) + " is not legal without a standing offer");
  }
  if ((action.kind == ActionKind::Propose) != action.price.has_value()) {
    throw Error(Errc::IllegalAction, "a price must accompany propose and only propose");
  }
  const auto& config = state.config_;
  if (action.price && (*action.price < config.price_min || *action.price > config.price_max)) {
    throw Error(Errc::PriceOutOfRange, std::to_string(*action.price) + " outside [" +
                                           std::to_string(config.price_min) + ", " +
                                           std::to_string(config.price_max) + "]");
  }

  TurnRecord record;
  record.turn_index = static_cast<int>(state.transcript_.size()) + 1;
  record.actor = actor;
  record.reasoning = std::move(reasoning);
  record.message = std::move(message);
  record.action = action;
  state.transcript_.push_back(std::move(record));

  switch (action.kind) {
    case ActionKind::Propose:
      state.standing_ = StandingOffer{*action.price, actor};
      if (static_cast<int>(state.transcript_.size()) >= config.max_turns) {
        state.standing_.reset();
        state.end_reason_ = EndReason::TurnLimit;
      }
      break;
    case ActionKind::Accept:
      state.standing_.reset();
      state.end_reason_ = EndReason::Agreement;
      break;
    case ActionKind::Reject:
      state.standing_.reset();
      state.end_reason_ = EndReason::Rejected;
      break;
  }
  return state;
}

Winner classify_outcome(EndReason reason, std::optional<int> final_price, int win_baseline) {
  const bool agreed = reason == EndReason::Agreement;
  if (agreed != final_price.has_value()) {
    throw Error(Errc::InconsistentOutcome,
                agreed ? "agreement without a final price"
                       : std::string(to_string(reason)) + " carries a final price");
  }
  if (!agreed) return Winner::Draw;
  if (*final_price > win_baseline) return Winner::SellerWin;
  if (*final_price < win_baseline) return Winner::BuyerWin;
  return Winner::Draw;
}

}  // namespace bargain
