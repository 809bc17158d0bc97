#include "bargain/error.hpp"

namespace bargain {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::OutOfTurn: return "OutOfTurn";
    case Errc::IllegalAction: return "IllegalAction";
    case Errc::PriceOutOfRange: return "PriceOutOfRange";
    case Errc::InconsistentOutcome: return "InconsistentOutcome";
    case Errc::UnknownPersona: return "UnknownPersona";
    case Errc::MalformedReply: return "MalformedReply";
    case Errc::IllegalMove: return "IllegalMove";
    case Errc::AgentFailure: return "AgentFailure";
    case Errc::AuthError: return "AuthError";
    case Errc::Timeout: return "Timeout";
    case Errc::TransportError: return "TransportError";
    case Errc::ProtocolError: return "ProtocolError";
    case Errc::ScriptExhausted: return "ScriptExhausted";
    case Errc::EmptyAxis: return "EmptyAxis";
    case Errc::StorageError: return "StorageError";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::CorruptRow: return "CorruptRow";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::ModelMissingRole: return "ModelMissingRole";
    case Errc::ConfigError: return "ConfigError";
    case Errc::UnknownRound: return "UnknownRound";
    case Errc::ReplayMismatch: return "ReplayMismatch";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace bargain

#include <cstdio>

#include "bargain/hash.hpp"

namespace bargain {

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace bargain
