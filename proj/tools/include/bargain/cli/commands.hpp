#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "bargain/error.hpp"
#include "bargain/llm_gateway.hpp"
#include "bargain/report.hpp"

namespace bargain::cli {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad arguments or config
  kExitData = 2,      // unreadable, invalid or unusable data
  kExitInternal = 3,
};

int exit_code_for(Errc code) noexcept;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
};

struct RunHooks {
  std::shared_ptr<Transport> transport;  // HttpTransport when null
  std::shared_ptr<Clock> clock;          // SystemClock when null
  Timestamp now = utc_now;
};

int cmd_run(const std::filesystem::path& config_path, const GlobalOptions& global,
            std::ostream& out, std::ostream& err, const RunHooks& hooks = {});

struct AnalyzeOptions {
  std::optional<std::filesystem::path> out_dir;  // defaults to <rounds dir>/analysis
  bool include_aborted = false;                  // read aborts.log beside rounds.csv
  AnalysisOptions analysis;
};

int cmd_analyze(const std::filesystem::path& rounds_path, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err);

// An empty round_id replays every transcript in the file.
int cmd_replay(const std::filesystem::path& transcripts_path, const std::string& round_id,
               std::ostream& out, std::ostream& err);

int cmd_personas_list(std::ostream& out, std::ostream& err,
                      const std::optional<std::filesystem::path>& persona_dir = std::nullopt);

}  // namespace bargain::cli
