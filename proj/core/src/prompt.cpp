#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "bargain/agents.hpp"
#include "bargain/error.hpp"

namespace bargain {

namespace {

constexpr std::string_view kFenceOpen = "```move";
constexpr std::string_view kFence = "```";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string role_title(Role role) { return role == Role::Seller ? "Seller" : "Buyer"; }

std::string describe_action(const Action& action) {
  switch (action.kind) {
    case ActionKind::Propose: return "proposes " + std::to_string(*action.price);
    case ActionKind::Accept: return "accepts";
    case ActionKind::Reject: return "rejects";
  }
  return "?";
}

std::string legal_list(ActionSet legal) {
  std::string out;
  for (auto kind : legal.kinds()) {
    if (!out.empty()) out += ", ";
    out += to_string(kind);
  }
  return out;
}

std::string system_prompt(const Observation& obs, const RoundConfig& config,
                          const PromptOptions& options) {
  const auto& item = config.item_name;
  const auto& cur = config.currency_name;
  std::ostringstream s;
  s << "You are the " << role_title(obs.role) << " in a negotiation over one unit of item "
    << item << ", priced in " << cur << ".\n";
  if (obs.role == Role::Seller) {
    s << "Your goal: sell " << item << " for as high a price as you can.\n";
  } else {
    s << "Your goal: buy " << item << " for as low a price as you can.\n";
  }

  const auto persona = render_persona_block(obs.persona, options.persona_mode,
                                            options.rotation_index);
  if (!persona.empty()) s << "\nYour personality:\n" << persona << "\n";

  s << "\nRules:\n"
    << "- The Seller makes the first offer, then the two sides take turns.\n"
    << "- On each turn choose exactly one action: propose a price, accept the other side's "
       "latest proposal, or reject it.\n"
    << "- Accepting closes the deal at the proposed price. Rejecting ends the negotiation "
       "with no deal.\n"
    << "- The negotiation lasts at most " << config.max_turns
    << " turns in total, counting both sides. If no deal is reached by then, there is no "
       "deal.\n"
    << "- Prices are whole numbers of " << cur << " from " << config.price_min << " to "
    << config.price_max << ".\n";

  s << "\nPrivate information (do not reveal it):\n";
  if (obs.role == Role::Seller) {
    s << "- Producing " << item << " cost you " << obs.private_valuation << " " << cur << ".\n";
  } else {
    s << "- The most you are able to pay for " << item << " is " << obs.private_valuation << " "
      << cur << ".\n";
  }

  s << "\nBefore answering, think through your strategy privately. Then write one message "
       "to the other side and choose your action. Answer with exactly one fenced block in "
       "this format:\n"
    << kFenceOpen << "\n"
    << "reasoning: <private reasoning, never shown to the other side>\n"
    << "message: <what you say to the other side>\n"
    << "action: <propose|accept|reject>\n"
    << "price: <whole number, only when action is propose>\n"
    << kFence << "\n";
  return s.str();
}

std::string turn_prompt(const Observation& obs, const RoundConfig& config) {
  std::ostringstream s;
  const int turn = config.max_turns - obs.turns_remaining + 1;
  s << "Turn " << turn << " of " << config.max_turns << ". ";
  if (obs.standing_offer) {
    s << "The " << role_title(opponent(obs.role)) << "'s latest proposal is "
      << *obs.standing_offer << " " << config.currency_name << ". ";
  } else {
    s << "There is no proposal on the table yet. ";
  }
  s << "Legal actions now: " << legal_list(obs.legal) << ".";
  if (obs.turns_remaining == 1) {
    s << "\nFinal turn: this is your final offer opportunity. A new proposal now cannot be "
         "answered and ends the negotiation with no deal.";
  } else if (obs.turns_remaining == 2) {
    s << "\nThis is your last chance to make an offer the other side can still accept.";
  }
  return s.str();
}

void push_merged(std::vector<ChatMessage>& messages, std::string role, std::string content) {
  if (!messages.empty() && messages.back().role == role) {
    messages.back().content += "\n\n" + content;
  } else {
    messages.push_back({std::move(role), std::move(content)});
  }
}

[[noreturn]] void malformed(const std::string& why) { throw Error(Errc::MalformedReply, why); }

}  // namespace

std::vector<ChatMessage> build_prompt(const Observation& obs, const RoundConfig& config,
                                      const PromptOptions& options) {
  std::vector<ChatMessage> messages;
  messages.push_back({"system", system_prompt(obs, config, options)});
  push_merged(messages, "user", "The negotiation begins.");

  std::size_t own_index = 0;
  for (const auto& turn : obs.public_transcript) {
    if (turn.actor == obs.role) {
      AgentMove own;
      if (own_index < obs.own_reasoning.size()) own.reasoning = obs.own_reasoning[own_index];
      ++own_index;
      own.message = turn.message;
      own.action = turn.action;
      push_merged(messages, "assistant", format_move_block(own));
    } else {
      push_merged(messages, "user",
                  "Turn " + std::to_string(turn.turn_index) + ", " +
                      role_title(turn.actor) + " says: \"" + turn.message + "\" and " +
                      describe_action(turn.action) + ".");
    }
  }
  push_merged(messages, "user", turn_prompt(obs, config));
  return messages;
}

std::string format_move_block(const AgentMove& move) {
  std::string out(kFenceOpen);
  out += "\nreasoning: " + move.reasoning;
  out += "\nmessage: " + move.message;
  out += "\naction: " + std::string(to_string(move.action.kind));
  if (move.action.price) out += "\nprice: " + std::to_string(*move.action.price);
  out += "\n";
  out += kFence;
  return out;
}

AgentMove parse_move(std::string_view raw, const Observation& obs) {
  const auto open = raw.find(kFenceOpen);
  if (open == std::string_view::npos) malformed("no ```move block in reply");
  auto body = raw.substr(open + kFenceOpen.size());
  const auto close = body.find(kFence);
  if (close == std::string_view::npos) malformed("unterminated ```move block");
  body = body.substr(0, close);

  std::optional<std::string> reasoning, message, action, price;
  std::optional<std::string>* current = nullptr;
  std::istringstream lines{std::string(body)};
  for (std::string line; std::getline(lines, line);) {
    const auto colon = line.find(':');
    std::optional<std::string>* field = nullptr;
    if (colon != std::string::npos) {
      const auto key = lower(trim(std::string_view(line).substr(0, colon)));
      if (key == "reasoning") field = &reasoning;
      else if (key == "message") field = &message;
      else if (key == "action") field = &action;
      else if (key == "price") field = &price;
    }
    if (field) {
      if (field->has_value()) malformed("duplicate field in move block");
      *field = std::string(trim(std::string_view(line).substr(colon + 1)));
      current = field;
    } else if (current && (current == &reasoning || current == &message)) {
      **current += "\n" + line;
    } else if (!trim(line).empty()) {
      malformed("unrecognised line in move block: " + line);
    }
  }

  if (!action) malformed("move block has no action");
  const auto kind = parse_action_kind(lower(*action));
  if (!kind) malformed("unknown action '" + *action + "'");

  AgentMove move;
  move.reasoning = reasoning ? std::string(trim(*reasoning)) : std::string();
  move.message = message ? std::string(trim(*message)) : std::string();
  if (*kind == ActionKind::Propose) {
    if (!price || price->empty()) malformed("propose without a price");
    int value = 0;
    const auto* first = price->data();
    const auto* last = price->data() + price->size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) malformed("price is not an integer: '" + *price + "'");
    move.action = Action::propose(value);
  } else {
    if (price && !price->empty()) malformed(*action + " must not carry a price");
    move.action = *kind == ActionKind::Accept ? Action::accept() : Action::reject();
  }

  if (!obs.legal.contains(*kind)) {
    throw Error(Errc::IllegalMove, std::string(to_string(*kind)) + " is not legal now (legal: " +
                                       legal_list(obs.legal) + ")");
  }
  if (move.action.price &&
      (*move.action.price < obs.price_min || *move.action.price > obs.price_max)) {
    throw Error(Errc::PriceOutOfRange, std::to_string(*move.action.price) + " outside [" +
                                           std::to_string(obs.price_min) + ", " +
                                           std::to_string(obs.price_max) + "]");
  }
  return move;
}

AgentMove llm_decide(const Observation& obs, const RoundConfig& config, ChatGateway& gateway,
                     const ModelEndpoint& endpoint, int retry_budget,
                     const PromptOptions& options) {
  ChatRequest request;
  request.messages = build_prompt(obs, config, options);
  std::string last_error;
  for (int attempt = 0; attempt <= retry_budget; ++attempt) {
    ChatReply reply;
    try {
      reply = gateway.send_chat(endpoint, request);
    } catch (const Error& e) {
      throw Error(Errc::AgentFailure, endpoint.model_id + ": " + e.what());
    }
    try {
      return parse_move(reply.content, obs);
    } catch (const Error& e) {
      if (e.code() != Errc::MalformedReply && e.code() != Errc::IllegalMove &&
          e.code() != Errc::PriceOutOfRange) {
        throw;
      }
      last_error = e.what();
      request.messages.push_back({"assistant", reply.content});
      request.messages.push_back(
          {"user", "Your previous reply could not be used (" + last_error +
                       "). Reply again with exactly one ```move block and a legal action: " +
                       legal_list(obs.legal) + "."});
    }
  }
  throw Error(Errc::AgentFailure, endpoint.model_id + ": no usable reply after " +
                                      std::to_string(retry_budget + 1) +
                                      " attempts; last error: " + last_error);
}

}  // namespace bargain
