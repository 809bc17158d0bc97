#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bargain/engine.hpp"
#include "bargain/llm_gateway.hpp"
#include "bargain/personas.hpp"
#include "bargain/report.hpp"
#include "bargain/tournament.hpp"

namespace bargain::cli {

struct RunConfig {
  std::vector<AgentDescriptor> models;
  std::vector<Persona> personas;
  int repetitions = 1;
  std::uint64_t seed = 0;
  RoundConfig round;
  int parallelism = 1;
  std::filesystem::path output_dir;
  std::optional<std::filesystem::path> persona_dir;

  RetryPolicy retry;
  std::string gateway_log = "gateway.log";  // under output_dir; empty disables

  bool analyze = true;  // run the analysis into output_dir/analysis afterwards
  AnalysisOptions analysis;

  std::string fingerprint;  // of the normalized document, without overrides
};

// Parses the JSON run config (comments allowed). Relative paths stay relative
// to the working directory. Throws Error(ConfigError) naming the bad field.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Creates the output directory and checks it can be written. Throws
// Error(ConfigError).
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace bargain::cli
