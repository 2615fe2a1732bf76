#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agent/config.hpp"
#include "agent/environments.hpp"
#include "agent/evolution.hpp"

namespace agent {

// Exit codes shared by the CLI subcommands.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitBudgetExhausted = 3;

// CSV header of the per-generation telemetry file.
extern const char* kTelemetryHeader;
std::string telemetry_row(const GenerationReport& report);

// Scenario thresholds for a given generation, honoring the late-threshold
// schedule.
ScenarioSet scenario_set_for(const ExperimentConfig& cfg, int generation);

// Builds the fitness hook: compile the genome, run the progressive-episode
// scheme on the experiment's fixed training scenarios.
EvalFn make_eval_fn(const ExperimentConfig& cfg);

struct EvolveOutcome {
  int exit_code = kExitSuccess;
  bool solved = false;
  double best_fitness = 0.0;
  std::filesystem::path telemetry_path;
  std::filesystem::path best_genome_path;
  std::filesystem::path manifest_path;
};

// Full `evolve` run: writes manifest.txt up front, streams telemetry.csv one
// flushed row per generation, and writes best_genome.txt at the end. The
// manifest and genome files are written atomically (temp + rename).
EvolveOutcome run_experiment(const ExperimentConfig& cfg,
                             const ReportSink& progress = {});

struct EvalSummary {
  int episodes = 0;
  double mean_reward = 0.0;
  double min_reward = 0.0;
  double max_reward = 0.0;
  int successes = 0;  // episodes that reached the environment goal
  std::vector<double> rewards;
  std::vector<long> steps;
};

// Replays `episodes` seeded episodes of a genome. Episode seeds use the same
// derivation as training scenario seeds, so passing a run's seed replays its
// training scenarios. When `trace_dir` is nonempty, writes one
// episode_<i>.csv trace per episode.
EvalSummary evaluate_genome(const Genome& genome, const std::string& env_name,
                            int episodes, std::uint64_t seed,
                            const std::string& trace_dir = "");

struct InspectReport {
  int nodes = 0;
  int inputs = 0;
  int hidden = 0;
  int outputs = 0;
  int bias = 0;
  int edges = 0;
  int depth = 0;  // longest input-to-output path, in edges
  std::map<std::string, int> activation_histogram;
  std::map<int, int> memory_histogram;
};

InspectReport inspect_genome(const Genome& genome);
std::string format_inspect(const InspectReport& report);

void write_text_file_atomic(const std::filesystem::path& path,
                            const std::string& content);

}  // namespace agent
