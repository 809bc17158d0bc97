#include "bargain/cli/commands.hpp"

#include <ostream>

#include <spdlog/spdlog.h>

#include "bargain/cli/config.hpp"
#include "bargain/tournament.hpp"
#include "bargain/version.hpp"

namespace bargain::cli {

namespace {

int report_error(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << "\n";
  return exit_code_for(e.code());
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

std::string describe_turn(const TurnRecord& t) {
  std::string line = (t.turn_index < 10 ? " " : "") + std::to_string(t.turn_index) + "  " +
                     std::string(to_string(t.actor)) + "  " + to_string(t.action);
  if (!t.message.empty()) line += "  \"" + t.message + "\"";
  return line;
}

}  // namespace

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::ConfigError:
    case Errc::InvalidConfig:
    case Errc::InvalidParams:
    case Errc::UnknownPersona:
    case Errc::UnknownRound:
    case Errc::EmptyAxis:
    case Errc::AuthError:
      return kExitUsage;
    case Errc::SchemaMismatch:
    case Errc::CorruptRow:
    case Errc::EmptyInput:
    case Errc::DegenerateData:
    case Errc::ReplayMismatch:
    case Errc::StorageError:
    case Errc::ModelMissingRole:
      return kExitData;
    default:
      return kExitInternal;
  }
}

int cmd_run(const std::filesystem::path& config_path, const GlobalOptions& global,
            std::ostream& out, std::ostream& err, const RunHooks& hooks) {
  return guarded(err, [&] {
    auto config = load_run_config(config_path);
    if (global.seed) config.seed = *global.seed;
    if (global.parallelism) {
      if (*global.parallelism < 1) throw Error(Errc::ConfigError, "--parallelism must be >= 1");
      config.parallelism = *global.parallelism;
    }
    ensure_writable_dir(config.output_dir);

    std::optional<PersonaRegistry> loaded;
    if (config.persona_dir) loaded = PersonaRegistry::from_directory(*config.persona_dir);
    const PersonaRegistry& registry = loaded ? *loaded : PersonaRegistry::builtin();

    const bool needs_gateway =
        std::any_of(config.models.begin(), config.models.end(), [](const AgentDescriptor& a) {
          return a.kind == AgentDescriptor::Kind::Llm;
        });
    std::shared_ptr<ChatGateway> gateway;
    if (needs_gateway) {
      GatewayOptions options;
      options.clock = hooks.clock;
      options.retry = config.retry;
      if (!config.gateway_log.empty()) {
        options.log_path = (config.output_dir / config.gateway_log).string();
      }
      auto transport = hooks.transport ? hooks.transport : std::make_shared<HttpTransport>();
      gateway = std::make_shared<Gateway>(std::move(transport), std::move(options));
    }

    const auto specs = expand_matrix(config.models, config.personas, config.repetitions,
                                     config.seed);
    spdlog::info("running {} rounds with parallelism {}", specs.size(), config.parallelism);

    TournamentOptions options;
    options.config = config.round;
    options.parallelism = config.parallelism;
    options.factory = default_agent_factory(gateway);
    options.registry = &registry;
    options.now = hooks.now;
    const std::size_t step = std::max<std::size_t>(specs.size() / 10, 1);
    options.progress = [step](std::size_t done, std::size_t total) {
      if (done % step == 0 || done == total) spdlog::info("{}/{} rounds finished", done, total);
    };

    RunManifest manifest;
    manifest.config_fingerprint = config.fingerprint;
    manifest.base_seed = config.seed;
    manifest.parallelism = config.parallelism;
    manifest.started_at = hooks.now ? hooks.now() : std::string();
    const auto results = run_tournament(specs, options);
    manifest.finished_at = hooks.now ? hooks.now() : std::string();
    manifest.extra["config_path"] = config_path.string();
    write_results(config.output_dir, results, manifest);

    for (const auto& a : results.aborts) spdlog::warn("aborted {}: {}", a.round_id, a.error);
    out << results.records.size() << " rounds written to " << config.output_dir.string();
    if (!results.aborts.empty()) out << ", " << results.aborts.size() << " aborted (see aborts.log)";
    out << "\n";

    if (results.records.empty() && !specs.empty()) {
      err << "error: every round aborted; see " << (config.output_dir / "aborts.log").string()
          << "\n";
      return static_cast<int>(kExitData);
    }

    if (config.analyze) {
      try {
        const auto report = analyze_rounds(results.records, config.analysis);
        write_report(config.output_dir / "analysis", report, config.analysis);
        for (const auto& w : report.warnings) spdlog::warn("{}", w);
        out << "analysis written to " << (config.output_dir / "analysis").string() << "\n";
      } catch (const Error& e) {
        spdlog::warn("analysis failed: {}", e.what());
      }
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_analyze(const std::filesystem::path& rounds_path, const AnalyzeOptions& options,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto records = load_results(rounds_path);
    if (records.empty()) throw Error(Errc::EmptyInput, rounds_path.string() + " has no rounds");
    if (options.include_aborted) {
      const auto aborts = load_aborts(rounds_path.parent_path() / "aborts.log");
      const int baseline = records.front().win_baseline;
      auto draws = aborts_as_draws(aborts, baseline);
      spdlog::info("including {} aborted rounds as draws", draws.size());
      records.insert(records.end(), draws.begin(), draws.end());
    }
    const auto dir = options.out_dir ? *options.out_dir : rounds_path.parent_path() / "analysis";
    const auto report = analyze_rounds(records, options.analysis);
    write_report(dir, report, options.analysis);
    out << render_text_report(report, options.analysis);
    out << "written to " << dir.string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_replay(const std::filesystem::path& transcripts_path, const std::string& round_id,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto docs = load_transcripts(transcripts_path);
    std::size_t checked = 0;
    std::size_t failed = 0;
    for (const auto& doc : docs) {
      if (!round_id.empty() && doc.record.round_id != round_id) continue;
      ++checked;
      const auto& r = doc.record;
      if (!round_id.empty()) {
        out << r.round_id << "  seller " << r.seller_model << " (" << to_string(r.seller_persona)
            << ") vs buyer " << r.buyer_model << " (" << to_string(r.buyer_persona) << ")\n";
        for (const auto& t : doc.turns) out << describe_turn(t) << "\n";
      }
      try {
        verify_replay(doc);
        out << r.round_id << ": OK (" << to_string(r.end_reason);
        if (r.final_price) out << " at " << *r.final_price;
        out << ", " << to_string(r.winner) << ")\n";
      } catch (const Error& e) {
        ++failed;
        out << r.round_id << ": MISMATCH " << e.what() << "\n";
      }
    }
    if (checked == 0) {
      if (!round_id.empty()) {
        throw Error(Errc::UnknownRound,
                    "round " + round_id + " not found in " + transcripts_path.string());
      }
      throw Error(Errc::EmptyInput, transcripts_path.string() + " has no transcripts");
    }
    if (round_id.empty()) {
      out << "verdict: " << (failed ? "MISMATCH" : "OK") << " (" << checked - failed << "/"
          << checked << " transcripts reproduced)\n";
    }
    if (failed) {
      err << "error: ReplayMismatch: " << failed << " transcript(s) did not reproduce\n";
      return static_cast<int>(kExitData);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_personas_list(std::ostream& out, std::ostream& err,
                      const std::optional<std::filesystem::path>& persona_dir) {
  return guarded(err, [&] {
    std::optional<PersonaRegistry> loaded;
    if (persona_dir) loaded = PersonaRegistry::from_directory(*persona_dir);
    const auto& registry = loaded ? *loaded : PersonaRegistry::builtin();
    for (const auto& spec : registry.all()) {
      std::string traits;
      for (const auto& t : spec.traits) {
        if (!traits.empty()) traits += ", ";
        traits += std::string(t.level == TraitLevel::High ? "High " : "Low ") +
                  std::string(to_string(t.dimension));
      }
      out << to_string(spec.name) << "\n  " << spec.summary << "\n  traits: "
          << (traits.empty() ? "none" : traits) << "\n  prompt variants: "
          << spec.prompt_variants.size() << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace bargain::cli
