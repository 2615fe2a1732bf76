#include "agent/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "agent/network.hpp"

namespace agent {

namespace fs = std::filesystem;

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* kTelemetryHeader =
    "generation,best_fitness,mean_fitness,diversity,desired_diversity,ratio,"
    "tournament_size,tournament_winners,improvement_best,improvement_avg,"
    "mutation_rate,species_sizes,evaluations,total_steps";

std::string telemetry_row(const GenerationReport& r) {
  std::ostringstream out;
  out << r.generation << ',' << format_double(r.best_fitness) << ','
      << format_double(r.mean_fitness) << ',' << format_double(r.diversity)
      << ',' << format_double(r.desired_diversity) << ','
      << format_double(r.ratio) << ',' << r.tournament_size << ','
      << r.tournament_winners << ',' << format_double(r.improvement_best)
      << ',' << format_double(r.improvement_avg) << ','
      << format_double(r.mutation_rate) << ',';
  for (std::size_t i = 0; i < r.species_sizes.size(); ++i) {
    if (i) out << '|';
    out << r.species_sizes[i];
  }
  out << ',' << r.evaluations << ',' << r.total_steps;
  return out.str();
}

ScenarioSet scenario_set_for(const ExperimentConfig& cfg, int generation) {
  ScenarioSet set;
  set.seeds = make_scenario_seeds(cfg.seed, cfg.scenarios);
  const bool late = cfg.threshold_switch_generation >= 0 &&
                    generation >= cfg.threshold_switch_generation;
  set.thresholds.assign(cfg.scenarios,
                        late ? cfg.pass_threshold_late : cfg.pass_threshold);
  return set;
}

EvalFn make_eval_fn(const ExperimentConfig& cfg) {
  const std::string env_name = cfg.environment;
  return [cfg, env_name](const Genome& genome, int generation) -> EvalResult {
    const auto env = make_environment(env_name);
    Phenotype net = Phenotype::compile(genome, env->time_step());
    const ScenarioSet scenarios = scenario_set_for(cfg, generation);
    const FitnessOutcome outcome = progressive_fitness(
        [&](std::uint64_t seed) { return run_episode(*env, net, seed); },
        scenarios);
    return {outcome.f_net, outcome.total_steps};
  };
}

void write_text_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write file: " + tmp.string());
    out << content;
    out.flush();
    if (!out)
      throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

EvolveOutcome run_experiment(const ExperimentConfig& cfg,
                             const ReportSink& progress) {
  cfg.check();
  const auto env = make_environment(cfg.environment);

  EvolveOutcome outcome;
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);
  outcome.telemetry_path = out_dir / "telemetry.csv";
  outcome.best_genome_path = out_dir / "best_genome.txt";
  outcome.manifest_path = out_dir / "manifest.txt";

  write_text_file_atomic(outcome.manifest_path, render_config(cfg));

  std::ofstream telemetry(outcome.telemetry_path,
                          std::ios::binary | std::ios::trunc);
  if (!telemetry)
    throw std::runtime_error("cannot write telemetry: " +
                             outcome.telemetry_path.string());
  telemetry << kTelemetryHeader << '\n';
  telemetry.flush();

  ReportSink sink = [&](const GenerationReport& report) {
    telemetry << telemetry_row(report) << '\n';
    telemetry.flush();
    if (progress) progress(report);
  };

  const EvolutionConfig ec =
      cfg.evolution_config(env->n_obs(), env->action_space().dim);
  const RunResult run = run_evolution(ec, make_eval_fn(cfg),
                                      env->solve_threshold(), cfg.seed, sink);

  write_text_file_atomic(outcome.best_genome_path, serialize(run.best));
  outcome.solved = run.solved;
  outcome.best_fitness = run.best.fitness.value_or(0.0);
  outcome.exit_code = run.solved ? kExitSuccess : kExitBudgetExhausted;
  return outcome;
}

EvalSummary evaluate_genome(const Genome& genome, const std::string& env_name,
                            int episodes, std::uint64_t seed,
                            const std::string& trace_dir) {
  if (episodes < 0)
    throw std::invalid_argument("evaluate_genome: episodes must be >= 0");
  EvalSummary summary;
  summary.episodes = episodes;
  if (episodes == 0) return summary;

  const auto env = make_environment(env_name);
  Phenotype net = Phenotype::compile(genome, env->time_step());
  const auto seeds = make_scenario_seeds(seed, episodes);

  if (!trace_dir.empty()) fs::create_directories(trace_dir);

  for (int i = 0; i < episodes; ++i) {
    std::ofstream trace;
    if (!trace_dir.empty()) {
      const fs::path path =
          fs::path(trace_dir) / ("episode_" + std::to_string(i) + ".csv");
      trace.open(path, std::ios::binary | std::ios::trunc);
      if (!trace)
        throw std::runtime_error("cannot write trace: " + path.string());
      trace << "step";
      for (int o = 0; o < env->n_obs(); ++o) trace << ",obs" << o;
      trace << ",action,reward,done\n";
    }
    const EpisodeResult res =
        run_episode(*env, net, seeds[i], trace.is_open() ? &trace : nullptr);
    summary.rewards.push_back(res.reward);
    summary.steps.push_back(res.steps);
    if (res.solved) ++summary.successes;
  }

  summary.min_reward = *std::min_element(summary.rewards.begin(),
                                         summary.rewards.end());
  summary.max_reward = *std::max_element(summary.rewards.begin(),
                                         summary.rewards.end());
  double sum = 0.0;
  for (double r : summary.rewards) sum += r;
  summary.mean_reward = sum / episodes;
  return summary;
}

InspectReport inspect_genome(const Genome& genome) {
  InspectReport report;
  report.nodes = static_cast<int>(genome.nodes.size());
  report.edges = static_cast<int>(genome.edges.size());
  for (const auto& n : genome.nodes) {
    switch (n.role) {
      case NodeRole::Input: ++report.inputs; break;
      case NodeRole::Hidden: ++report.hidden; break;
      case NodeRole::Output: ++report.outputs; break;
      case NodeRole::Bias: ++report.bias; break;
    }
    // Inputs and the bias have no activation applied; memory is 0 for them.
    if (n.role == NodeRole::Hidden || n.role == NodeRole::Output)
      ++report.activation_histogram[to_string(n.activation)];
    ++report.memory_histogram[n.memory];
  }
  for (int m = 0; m < kMemoryKinds; ++m) report.memory_histogram[m] += 0;

  // Longest path from any input/bias to any output, via the phenotype's
  // topological order. Invalid genomes report depth 0.
  if (is_valid(genome)) {
    Phenotype net = Phenotype::compile(genome, 1.0);
    std::map<int, int> longest;
    std::map<int, std::vector<std::pair<int, int>>> incoming;  // target -> sources
    for (const auto& e : genome.edges)
      incoming[e.target].emplace_back(e.source, 0);
    for (int id : net.topo_order()) {
      const NodeGene* n = genome.find_node(id);
      if (n->role == NodeRole::Input || n->role == NodeRole::Bias) {
        longest[id] = 0;
        continue;
      }
      int best = 0;
      for (const auto& [src, _] : incoming[id])
        best = std::max(best, longest[src] + 1);
      longest[id] = best;
      if (n->role == NodeRole::Output) report.depth = std::max(report.depth, best);
    }
  }
  return report;
}

std::string format_inspect(const InspectReport& r) {
  std::ostringstream out;
  out << "nodes: " << r.nodes << " (inputs " << r.inputs << ", bias " << r.bias
      << ", hidden " << r.hidden << ", outputs " << r.outputs << ")\n";
  out << "edges: " << r.edges << '\n';
  out << "depth: " << r.depth << '\n';
  out << "activations:";
  for (Activation a : {Activation::ModifiedSigmoid, Activation::SaturatedLinear,
                       Activation::Sigmoid}) {
    const auto it = r.activation_histogram.find(to_string(a));
    out << ' ' << to_string(a) << '='
        << (it == r.activation_histogram.end() ? 0 : it->second);
  }
  out << '\n';
  out << "memory:";
  for (const auto& [m, count] : r.memory_histogram)
    out << " M" << m << '=' << count;
  out << '\n';
  return out.str();
}

}  // namespace agent
