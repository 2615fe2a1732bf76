// Command-line harness for the neuroevolution engine: seeded experiment runs
// with CSV telemetry, genome evaluation/replay, and genome inspection.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "agent/config.hpp"
#include "agent/harness.hpp"

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* raw = std::getenv("AGENT_LOG");
    if (!raw) return LogLevel::Info;
    const std::string v(raw);
    if (v == "quiet" || v == "0") return LogLevel::Quiet;
    if (v == "debug" || v == "2") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

int cmd_evolve(const std::string& config_path, std::optional<int> threads,
               std::optional<std::uint64_t> seed) {
  agent::ExperimentConfig cfg = agent::load_config_file(config_path);
  if (threads) cfg.threads = *threads;
  if (seed) cfg.seed = *seed;
  cfg.check();

  agent::ReportSink progress;
  if (log_level() >= LogLevel::Info) {
    progress = [](const agent::GenerationReport& r) {
      std::fprintf(stderr,
                   "gen %4d  best %10.4f  mean %10.4f  D %8.2f  ratio %.3f  "
                   "mu %.3f  evals %ld\n",
                   r.generation, r.best_fitness, r.mean_fitness, r.diversity,
                   r.ratio, r.mutation_rate, r.evaluations);
    };
  }

  const agent::EvolveOutcome outcome = agent::run_experiment(cfg, progress);
  std::printf("status: %s\n", outcome.solved ? "solved" : "budget exhausted");
  std::printf("best_fitness: %.17g\n", outcome.best_fitness);
  std::printf("telemetry: %s\n", outcome.telemetry_path.string().c_str());
  std::printf("best_genome: %s\n", outcome.best_genome_path.string().c_str());
  std::printf("manifest: %s\n", outcome.manifest_path.string().c_str());
  return outcome.exit_code;
}

int cmd_eval(const std::string& genome_path, const std::string& env_name,
             int episodes, std::uint64_t seed, const std::string& trace_dir) {
  const agent::Genome genome = agent::load_genome_file(genome_path);
  const agent::EvalSummary summary =
      agent::evaluate_genome(genome, env_name, episodes, seed, trace_dir);
  std::printf("episodes: %d\n", summary.episodes);
  if (summary.episodes == 0) return agent::kExitSuccess;
  if (log_level() >= LogLevel::Debug) {
    for (std::size_t i = 0; i < summary.rewards.size(); ++i)
      std::fprintf(stderr, "episode %zu: reward %.17g steps %ld\n", i,
                   summary.rewards[i], summary.steps[i]);
  }
  std::printf("mean_reward: %.17g\n", summary.mean_reward);
  std::printf("min_reward: %.17g\n", summary.min_reward);
  std::printf("max_reward: %.17g\n", summary.max_reward);
  std::printf("successes: %d\n", summary.successes);
  return agent::kExitSuccess;
}

int cmd_inspect(const std::string& genome_path) {
  const agent::Genome genome = agent::load_genome_file(genome_path);
  const agent::InspectReport report = agent::inspect_genome(genome);
  std::fputs(agent::format_inspect(report).c_str(), stdout);
  return agent::kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AGENT neuroevolution experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed_override;
  auto* evolve = app.add_subcommand("evolve", "run a seeded experiment");
  evolve->add_option("--config", config_path, "experiment config file")
      ->required();
  evolve->add_option("--threads", threads, "cap evaluation concurrency");
  evolve->add_option("--seed", seed_override, "override the config seed");

  std::string genome_path, env_name, trace_dir;
  int episodes = 10;
  std::uint64_t eval_seed = 1;
  auto* eval = app.add_subcommand("eval", "replay a genome on an environment");
  eval->add_option("--genome", genome_path, "genome file")->required();
  eval->add_option("--env", env_name, "environment name")->required();
  eval->add_option("--episodes", episodes, "number of episodes");
  eval->add_option("--seed", eval_seed, "base seed for episode scenarios");
  eval->add_option("--trace", trace_dir, "write per-episode trajectory CSVs");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "summarize a genome file");
  inspect->add_option("--genome", inspect_path, "genome file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? agent::kExitSuccess : agent::kExitUsage;
  }

  try {
    if (evolve->parsed()) return cmd_evolve(config_path, threads, seed_override);
    if (eval->parsed())
      return cmd_eval(genome_path, env_name, episodes, eval_seed, trace_dir);
    if (inspect->parsed()) return cmd_inspect(inspect_path);
  } catch (const agent::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return agent::kExitUsage;
  } catch (const agent::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return agent::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return agent::kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return agent::kExitRuntime;
  }
  return agent::kExitUsage;
}
