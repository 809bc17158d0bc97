#pragma once

// Buy-and-sell negotiation protocol: the seller opens with a proposal, the
// players alternate, and each turn is one of Propose / Accept / Reject. The
// round is capped at `max_turns` recorded actions across both players.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bargain {

enum class Role : std::uint8_t { Seller, Buyer };

inline constexpr Role opponent(Role role) noexcept {
  return role == Role::Seller ? Role::Buyer : Role::Seller;
}

enum class ActionKind : std::uint8_t { Propose, Accept, Reject };

enum class EndReason : std::uint8_t { Agreement, Rejected, TurnLimit };

enum class Winner : std::uint8_t { SellerWin, BuyerWin, Draw };

std::string_view to_string(Role role) noexcept;
std::string_view to_string(ActionKind kind) noexcept;
std::string_view to_string(EndReason reason) noexcept;
std::string_view to_string(Winner winner) noexcept;

std::optional<Role> parse_role(std::string_view text) noexcept;
std::optional<ActionKind> parse_action_kind(std::string_view text) noexcept;
std::optional<EndReason> parse_end_reason(std::string_view text) noexcept;
std::optional<Winner> parse_winner(std::string_view text) noexcept;

struct RoundConfig {
  std::string item_name = "X";
  std::string currency_name = "ZUP";
  int seller_cost = 40;
  int buyer_limit = 60;
  int win_baseline = 50;
  int max_turns = 10;
  int price_min = 0;
  int price_max = 100;

  // Throws Error(InvalidConfig).
  void validate() const;

  friend bool operator==(const RoundConfig&, const RoundConfig&) = default;
};

struct Action {
  ActionKind kind = ActionKind::Accept;
  std::optional<int> price;  // engaged iff kind == Propose

  static Action propose(int price) { return {ActionKind::Propose, price}; }
  static Action accept() { return {ActionKind::Accept, std::nullopt}; }
  static Action reject() { return {ActionKind::Reject, std::nullopt}; }

  friend bool operator==(const Action&, const Action&) = default;
};

std::string to_string(const Action& action);

class ActionSet {
 public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<ActionKind> kinds) {
    for (auto kind : kinds) insert(kind);
  }

  constexpr void insert(ActionKind kind) { bits_ |= bit(kind); }
  constexpr bool contains(ActionKind kind) const { return (bits_ & bit(kind)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(((bits_ >> 0) & 1u) + ((bits_ >> 1) & 1u) +
                                    ((bits_ >> 2) & 1u));
  }
  std::vector<ActionKind> kinds() const;

  friend constexpr bool operator==(ActionSet, ActionSet) = default;

 private:
  static constexpr std::uint8_t bit(ActionKind kind) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(kind));
  }
  std::uint8_t bits_ = 0;
};

struct TurnRecord {
  int turn_index = 0;  // 1-based
  Role actor = Role::Seller;
  std::string reasoning;  // private to the actor
  std::string message;    // shown to the opponent
  Action action;

  friend bool operator==(const TurnRecord&, const TurnRecord&) = default;
};

struct StandingOffer {
  int price = 0;
  Role proposer = Role::Seller;

  friend bool operator==(const StandingOffer&, const StandingOffer&) = default;
};

struct RoundOutcome {
  EndReason end_reason = EndReason::TurnLimit;
  std::optional<int> final_price;  // engaged iff end_reason == Agreement
  Winner winner = Winner::Draw;
  int turns_used = 0;

  friend bool operator==(const RoundOutcome&, const RoundOutcome&) = default;
};

// Immutable snapshot of a round. New states are produced by apply_action.
class NegotiationState {
 public:
  const RoundConfig& config() const noexcept { return config_; }
  const std::vector<TurnRecord>& transcript() const noexcept { return transcript_; }
  const std::optional<StandingOffer>& standing_offer() const noexcept { return standing_; }

  bool is_open() const noexcept { return !end_reason_.has_value(); }
  std::optional<EndReason> end_reason() const noexcept { return end_reason_; }

  Role next_actor() const noexcept {
    return transcript_.size() % 2 == 0 ? Role::Seller : Role::Buyer;
  }
  int turns_remaining() const noexcept {
    return is_open() ? config_.max_turns - static_cast<int>(transcript_.size()) : 0;
  }

  // Engaged once the round is closed.
  std::optional<RoundOutcome> outcome() const;

 private:
  friend NegotiationState new_round(const RoundConfig& config);
  friend NegotiationState apply_action(NegotiationState state, Role actor,
                                       std::string reasoning, std::string message,
                                       Action action);

  RoundConfig config_;
  std::vector<TurnRecord> transcript_;
  std::optional<StandingOffer> standing_;
  std::optional<EndReason> end_reason_;
};

// Throws Error(InvalidConfig) when the config invariants fail.
NegotiationState new_round(const RoundConfig& config);

ActionSet legal_actions(const NegotiationState& state) noexcept;

// Throws Error(OutOfTurn | IllegalAction | PriceOutOfRange).
NegotiationState apply_action(NegotiationState state, Role actor, std::string reasoning,
                              std::string message, Action action);

// Throws Error(InconsistentOutcome) when price presence contradicts the reason.
Winner classify_outcome(EndReason reason, std::optional<int> final_price, int win_baseline);

}  // namespace bargain
