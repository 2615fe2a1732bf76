#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "agent/adaptation.hpp"
#include "agent/diversity.hpp"
#include "agent/genome.hpp"
#include "agent/variation.hpp"

namespace agent {

struct SpeciesPartition {
  std::vector<int> representatives;       // population indices
  std::vector<std::vector<int>> members;  // per species, population indices
  std::vector<int> species_of;            // per population index
  int species_count() const { return static_cast<int>(members.size()); }
};

// Farthest-first speciation: the fittest genome seeds the first species and
// each further representative maximizes its minimum distance to those already
// chosen; everything else joins its nearest representative.
SpeciesPartition speciate(std::span<const Genome> population,
                          int species_count);

struct GenerationReport {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  double diversity = 0.0;
  double desired_diversity = 0.0;
  double ratio = 0.0;  // N_W / N_T used to breed this generation
  int tournament_size = 0;
  int tournament_winners = 0;
  double improvement_best = 0.0;
  double improvement_avg = 0.0;
  double mutation_rate = 0.0;
  std::vector<int> species_sizes;
  long evaluations = 0;  // cumulative fitness calls
  long total_steps = 0;  // cumulative environment steps
};

struct EvalResult {
  double fitness = 0.0;
  long steps = 0;
};

// Fitness evaluation hook; must be safe to call concurrently.
using EvalFn = std::function<EvalResult(const Genome&, int generation)>;
using ReportSink = std::function<void(const GenerationReport&)>;

struct EvolutionConfig {
  int n_inputs = 0;
  int n_outputs = 0;
  int population_size = 200;
  int t_max = 100;
  int species_count = 8;
  int tournament_size = 0;  // 0 = max(2, round(0.05 N))
  double stage2_fraction = 0.1;
  DiversityConfig diversity;
  AdaptationConfig adaptation;
  MutationRates rates;  // mu_structural is seeded from adaptation.mu_init
  int threads = 1;      // 0 = hardware concurrency
  void check() const;
};

// One generation of the two-stage loop. Stage 1 breeds within each species
// (champion kept unchanged, offspring quota proportional to species size);
// stage 2 breeds from the champion pool and replaces the worst stage-1
// offspring. Population size is preserved exactly; only offspring are
// evaluated.
std::vector<Genome> evolve_generation(
    const std::vector<Genome>& population, const SpeciesPartition& partition,
    const TournamentConfig& tournament, const MutationRates& rates,
    double stage2_fraction, const EvalFn& eval, int generation, int threads,
    InnovationTracker& tracker, RngStream& rng, long& evaluation_count,
    long& step_count);

struct RunResult {
  Genome best;
  std::vector<GenerationReport> telemetry;
  bool solved = false;
  long evaluations = 0;
  long total_steps = 0;
};

// Full evolution driver: seeded initialization, per-generation controller
// updates, speciated reproduction, and early stop once the best fitness
// reaches `solve_threshold`. Deterministic for a given config and seed,
// independent of the thread count.
RunResult run_evolution(const EvolutionConfig& cfg, const EvalFn& eval,
                        double solve_threshold, std::uint64_t seed,
                        const ReportSink& sink = {});

}  // namespace agent
