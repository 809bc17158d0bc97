#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "bargain/cli/commands.hpp"
#include "bargain/version.hpp"

int main(int argc, char** argv) {
  using namespace bargain::cli;

  CLI::App app{"Buyer/seller negotiation tournaments between scripted or LLM agents"};
  app.set_version_flag("--version", std::string(bargain::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::string log_level = "info";
  app.add_option("--seed", seed, "Override the base seed from the config");
  app.add_option("--parallelism", parallelism, "Override the number of concurrent rounds")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, critical or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  std::string config_path;
  auto* run = app.add_subcommand("run", "Play every round of the experiment matrix");
  run->add_option("config", config_path, "Run config file (JSON, comments allowed)")
      ->required();

  std::string rounds_path;
  AnalyzeOptions analyze_options;
  std::string out_dir;
  auto* analyze = app.add_subcommand("analyze", "Aggregate tables and price attribution");
  analyze->add_option("rounds", rounds_path, "rounds.csv written by run")->required();
  analyze->add_option("--out", out_dir, "Output directory (default: <rounds dir>/analysis)");
  analyze->add_flag("--include-aborted", analyze_options.include_aborted,
                    "Count aborted rounds from aborts.log as draws");
  auto& gbt = analyze_options.analysis.gbt;
  analyze->add_option("--trees", gbt.n_trees, "Boosting rounds")->capture_default_str();
  analyze->add_option("--depth", gbt.max_depth, "Maximum tree depth")->capture_default_str();
  analyze->add_option("--learning-rate", gbt.learning_rate, "Shrinkage")->capture_default_str();
  analyze->add_option("--min-leaf", gbt.min_samples_leaf, "Minimum rows per leaf")
      ->capture_default_str();
  bool no_attribution = false;
  analyze->add_flag("--no-attribution", no_attribution, "Skip the price model");

  std::string transcripts_path;
  std::string round_id;
  bool replay_all = false;
  auto* replay = app.add_subcommand("replay", "Re-apply stored actions and verify outcomes");
  replay->add_option("transcripts", transcripts_path, "transcripts.jsonl written by run")
      ->required();
  auto* round_opt = replay->add_option("--round", round_id, "Round id, e.g. R000003");
  auto* all_flag = replay->add_flag("--all", replay_all, "Verify every transcript");
  round_opt->excludes(all_flag);
  replay->callback([&] {
    if (round_id.empty() && !replay_all) throw CLI::RequiredError("--round or --all");
  });

  std::string persona_dir;
  auto* personas = app.add_subcommand("personas", "Persona definitions");
  personas->require_subcommand(1);
  auto* list = personas->add_subcommand("list", "List the personas and their traits");
  list->add_option("--dir", persona_dir, "Load persona files from this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  auto logger = spdlog::stderr_color_mt("bargain");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(config_path, {seed, parallelism}, std::cout, std::cerr);
    if (*analyze) {
      if (!out_dir.empty()) analyze_options.out_dir = out_dir;
      analyze_options.analysis.attribution = !no_attribution;
      return cmd_analyze(rounds_path, analyze_options, std::cout, std::cerr);
    }
    if (*replay) return cmd_replay(transcripts_path, round_id, std::cout, std::cerr);
    if (*list) {
      std::optional<std::filesystem::path> dir;
      if (!persona_dir.empty()) dir = persona_dir;
      return cmd_personas_list(std::cout, std::cerr, dir);
    }
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
