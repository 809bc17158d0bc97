#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bargain/agents.hpp"
#include "bargain/engine.hpp"
#include "bargain/llm_gateway.hpp"
#include "bargain/personas.hpp"

namespace bargain {

// A "model" in the experiment matrix: either a scripted preset family or an
// LLM endpoint.
struct AgentDescriptor {
  enum class Kind : std::uint8_t { Scripted, Llm };

  std::string label;
  Kind kind = Kind::Scripted;
  ScriptedVariant variant;                // Scripted only
  std::optional<ModelEndpoint> endpoint;  // Llm only
  int retry_budget = 3;
  PromptMode persona_mode = PromptMode::AllVariants;

  // Throws Error(InvalidConfig).
  void validate() const;
};

struct MatchSpec {
  std::size_t index = 0;
  AgentDescriptor seller_agent;
  AgentDescriptor buyer_agent;
  Persona seller_persona = Persona::Control;
  Persona buyer_persona = Persona::Control;
  int repetition = 0;  // 0-based repetition number within the cell
  std::uint64_t seed = 0;

  std::string round_id() const;
};

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t index) noexcept;

// Cartesian product seller_model x buyer_model x seller_persona x buyer_persona
// x repetition, in that nesting order. Throws Error(EmptyAxis).
std::vector<MatchSpec> expand_matrix(std::span<const AgentDescriptor> models,
                                     std::span<const Persona> personas, int repetitions,
                                     std::uint64_t base_seed);

struct RoundRecord {
  std::string round_id;
  std::string seller_model;
  std::string buyer_model;
  Persona seller_persona = Persona::Control;
  Persona buyer_persona = Persona::Control;
  int repetition = 0;
  std::uint64_t seed = 0;
  EndReason end_reason = EndReason::TurnLimit;
  std::optional<int> final_price;
  Winner winner = Winner::Draw;
  int turns_used = 0;
  int win_baseline = 50;
  std::string fingerprint;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

// Throws Error(CorruptRow) when the outcome fields contradict each other.
void validate_record(const RoundRecord& record);

struct TranscriptDocument {
  RoundRecord record;
  RoundConfig config;
  std::vector<TurnRecord> turns;
  std::string started_at;
  std::string finished_at;
  std::map<std::string, std::string> metadata;

  RoundOutcome outcome() const;
};

std::string to_json_line(const TranscriptDocument& doc);
// Throws Error(CorruptRow).
TranscriptDocument parse_transcript_line(std::string_view line);
// Throws Error(StorageError | CorruptRow).
std::vector<TranscriptDocument> load_transcripts(const std::filesystem::path& path);

// Re-applies the stored actions through the engine. Throws Error(ReplayMismatch)
// if an action is rejected by the engine.
RoundOutcome replay(const TranscriptDocument& doc);
// Throws Error(ReplayMismatch) unless the replayed outcome equals the stored one.
void verify_replay(const TranscriptDocument& doc);

// Hash over everything that shapes play: round config, both agents, personas
// and the persona prompt texts.
std::string round_fingerprint(const MatchSpec& spec, const RoundConfig& config,
                              const PersonaRegistry& registry);

struct PlayedRound {
  RoundRecord record;
  TranscriptDocument transcript;
};

using Timestamp = std::function<std::string()>;

// UTC, ISO-8601 with milliseconds.
std::string utc_now();

// Throws Error(AgentFailure) if an agent fails or produces a move the engine
// refuses.
PlayedRound play_round(const MatchSpec& spec, const RoundConfig& config, Agent& seller,
                       Agent& buyer, const PersonaRegistry& registry,
                       const Timestamp& now = utc_now);

using AgentFactory = std::function<std::unique_ptr<Agent>(
    const AgentDescriptor& agent, Role role, Persona persona, const MatchSpec& spec,
    const RoundConfig& config)>;

// Scripted descriptors become ScriptedAgent presets seeded by the spec; LLM
// descriptors share `gateway`, which may be null if no descriptor is an LLM.
AgentFactory default_agent_factory(std::shared_ptr<ChatGateway> gateway);

struct AbortEntry {
  std::string round_id;
  std::size_t spec_index = 0;
  std::string seller_model;
  std::string buyer_model;
  Persona seller_persona = Persona::Control;
  Persona buyer_persona = Persona::Control;
  std::uint64_t seed = 0;
  std::string error;

  friend bool operator==(const AbortEntry&, const AbortEntry&) = default;
};

std::string to_json_line(const AbortEntry& entry);
AbortEntry parse_abort_line(std::string_view line);
// A missing file reads as no aborts. Throws Error(CorruptRow).
std::vector<AbortEntry> load_aborts(const std::filesystem::path& path);

// Aborted rounds recast as priceless draws, for sensitivity checks.
std::vector<RoundRecord> aborts_as_draws(std::span<const AbortEntry> aborts, int win_baseline);

struct TournamentOptions {
  RoundConfig config;
  int parallelism = 1;
  AgentFactory factory;  // default_agent_factory(nullptr) when empty
  const PersonaRegistry* registry = nullptr;  // builtin when null
  Timestamp now = utc_now;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

// Results are ordered by spec index regardless of execution order.
struct TournamentResults {
  std::vector<RoundRecord> records;
  std::vector<TranscriptDocument> transcripts;
  std::vector<AbortEntry> aborts;
};

// Individual round failures become abort entries and never stop the run.
TournamentResults run_tournament(std::span<const MatchSpec> specs,
                                 const TournamentOptions& options);

// ---------------------------------------------------------------------------
// rounds.csv

inline constexpr std::string_view kRoundsSchema = "#bargain-rounds v1";
extern const std::vector<std::string_view> kRoundsColumns;

std::string rounds_csv(std::span<const RoundRecord> records);
// Throws Error(SchemaMismatch | CorruptRow), both with line numbers.
std::vector<RoundRecord> parse_rounds_csv(std::string_view text);
// Throws Error(StorageError) in addition.
std::vector<RoundRecord> load_results(const std::filesystem::path& path);

struct RunManifest {
  std::string config_fingerprint;
  std::string started_at;
  std::string finished_at;
  std::uint64_t base_seed = 0;
  int parallelism = 1;
  std::map<std::string, std::string> extra;
};

// Writes rounds.csv, transcripts.jsonl, aborts.log and run_manifest.json into
// `dir`, creating it if needed. Throws Error(StorageError).
void write_results(const std::filesystem::path& dir, const TournamentResults& results,
                   const RunManifest& manifest);

// Shared text-file helpers. Throw Error(StorageError).
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace bargain
