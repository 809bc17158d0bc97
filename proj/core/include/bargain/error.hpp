#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bargain {

enum class Errc {
  // engine
  InvalidConfig,
  OutOfTurn,
  IllegalAction,
  PriceOutOfRange,
  InconsistentOutcome,
  // personas
  UnknownPersona,
  // agents
  MalformedReply,
  IllegalMove,
  AgentFailure,
  // llm gateway
  AuthError,
  Timeout,
  TransportError,
  ProtocolError,
  ScriptExhausted,
  // tournament
  EmptyAxis,
  StorageError,
  SchemaMismatch,
  CorruptRow,
  // analysis
  EmptyInput,
  DegenerateData,
  InvalidParams,
  ModelMissingRole,
  // cli
  ConfigError,
  UnknownRound,
  ReplayMismatch,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bargain
