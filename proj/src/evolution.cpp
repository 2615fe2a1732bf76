#include "agent/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace agent {

namespace {

double fitness_of(const Genome& g) {
  if (!g.fitness) throw std::logic_error("genome has no fitness");
  return *g.fitness;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Evaluates every genome in `batch`, writing fitness in place. Results are
// reduced in index order, so the outcome does not depend on the thread count.
void evaluate_batch(std::vector<Genome>& batch, const EvalFn& eval,
                    int generation, int threads, long& evaluation_count,
                    long& step_count) {
  if (batch.empty()) return;
  const int n = static_cast<int>(batch.size());
  std::vector<EvalResult> results(n);
  std::vector<std::string> errors(n);
  std::vector<char> failed(n, 0);

  const auto eval_slot = [&](int i) {
    try {
      results[i] = eval(batch[i], generation);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      failed[i] = 1;
    }
  };

  threads = std::min(resolve_threads(threads), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) eval_slot(i);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        eval_slot(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int i = 0; i < n; ++i) {
    if (failed[i])
      throw std::runtime_error("fitness evaluation failed for genome " +
                               std::to_string(i) + " in generation " +
                               std::to_string(generation) + ": " + errors[i]);
    batch[i].fitness = results[i].fitness;
    ++evaluation_count;
    step_count += results[i].steps;
  }
}

// Offspring quotas proportional to species size (largest-remainder rounding).
std::vector<int> offspring_quotas(const SpeciesPartition& partition,
                                  int total_offspring, int population_size) {
  const int s = partition.species_count();
  std::vector<int> quota(s, 0);
  std::vector<std::pair<double, int>> remainders;  // (-remainder, species)
  int assigned = 0;
  for (int i = 0; i < s; ++i) {
    const double share = static_cast<double>(partition.members[i].size()) *
                         total_offspring / population_size;
    quota[i] = static_cast<int>(std::floor(share));
    assigned += quota[i];
    remainders.emplace_back(-(share - quota[i]), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int k = 0; k < total_offspring - assigned; ++k)
    ++quota[remainders[k % s].second];
  return quota;
}

int champion_of(const std::vector<Genome>& population,
                const std::vector<int>& members) {
  int best = members.front();
  for (int idx : members)
    if (fitness_of(population[idx]) > fitness_of(population[best]) ||
        (fitness_of(population[idx]) == fitness_of(population[best]) &&
         idx < best))
      best = idx;
  return best;
}

}  // namespace

SpeciesPartition speciate(std::span<const Genome> population,
                          int species_count) {
  const int n = static_cast<int>(population.size());
  if (species_count < 1)
    throw std::invalid_argument("speciate: species_count must be >= 1");
  if (n < species_count)
    throw std::invalid_argument("speciate: population smaller than species count");

  std::vector<TypeCounts> counts;
  counts.reserve(n);
  for (const auto& g : population) counts.push_back(type_counts(g));

  SpeciesPartition partition;
  partition.species_of.assign(n, -1);

  // First representative: the current best genome.
  int first = 0;
  for (int i = 1; i < n; ++i)
    if (fitness_of(population[i]) > fitness_of(population[first])) first = i;
  partition.representatives.push_back(first);

  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  while (static_cast<int>(partition.representatives.size()) < species_count) {
    const int last = partition.representatives.back();
    int farthest = -1;
    for (int i = 0; i < n; ++i) {
      min_dist[i] = std::min(min_dist[i], type_distance(counts[i], counts[last]));
      const bool is_rep =
          std::find(partition.representatives.begin(),
                    partition.representatives.end(),
                    i) != partition.representatives.end();
      if (is_rep) continue;
      if (farthest == -1 || min_dist[i] > min_dist[farthest]) farthest = i;
    }
    partition.representatives.push_back(farthest);
  }

  partition.members.resize(species_count);
  for (int s = 0; s < species_count; ++s)
    partition.species_of[partition.representatives[s]] = s;
  for (int i = 0; i < n; ++i) {
    if (partition.species_of[i] >= 0) continue;  // representative
    int nearest = 0;
    double best = type_distance(counts[i], counts[partition.representatives[0]]);
    for (int s = 1; s < species_count; ++s) {
      const double d =
          type_distance(counts[i], counts[partition.representatives[s]]);
      if (d < best) {
        best = d;
        nearest = s;
      }
    }
    partition.species_of[i] = nearest;
  }
  for (int i = 0; i < n; ++i)
    partition.members[partition.species_of[i]].push_back(i);
  return partition;
}

void EvolutionConfig::check() const {
  if (n_inputs < 1 || n_outputs < 1)
    throw std::invalid_argument("evolution: network dimensions must be >= 1");
  if (population_size < 4)
    throw std::invalid_argument("evolution: population_size must be >= 4");
  if (t_max < 0)
    throw std::invalid_argument("evolution: t_max must be >= 0");
  if (species_count < 1 || species_count > population_size)
    throw std::invalid_argument(
        "evolution: species_count must be in [1, population_size]");
  if (tournament_size < 0 || tournament_size == 1)
    throw std::invalid_argument("evolution: tournament_size must be 0 or >= 2");
  if (stage2_fraction < 0.0 || stage2_fraction > 1.0)
    throw std::invalid_argument("evolution: stage2_fraction must be in [0, 1]");
  if (threads < 0)
    throw std::invalid_argument("evolution: threads must be >= 0");
  diversity.check();
  adaptation.check();
  rates.check();
}

std::vector<Genome> evolve_generation(
    const std::vector<Genome>& population, const SpeciesPartition& partition,
    const TournamentConfig& tournament, const MutationRates& rates,
    double stage2_fraction, const EvalFn& eval, int generation, int threads,
    InnovationTracker& tracker, RngStream& rng, long& evaluation_count,
    long& step_count) {
  const int n = static_cast<int>(population.size());
  const int s = partition.species_count();

  std::vector<int> champions(s);
  for (int i = 0; i < s; ++i)
    champions[i] = champion_of(population, partition.members[i]);

  // Stage 1: within-species reproduction.
  const auto quotas = offspring_quotas(partition, n - s, n);
  std::vector<Genome> offspring;
  offspring.reserve(n - s);
  for (int sp = 0; sp < s; ++sp) {
    if (quotas[sp] == 0) continue;
    std::vector<Genome> pool;
    pool.reserve(partition.members[sp].size());
    for (int idx : partition.members[sp]) pool.push_back(population[idx]);
    const auto mating =
        tournament_select(pool, tournament, 2 * quotas[sp], rng);
    for (int q = 0; q < quotas[sp]; ++q) {
      Genome child = crossover(pool[mating[2 * q]], pool[mating[2 * q + 1]], rng);
      child = mutate_offspring(child, rates, tracker, rng);
      offspring.push_back(std::move(child));
    }
  }

  // Stage 2: reproduction among species champions.
  const int stage2 =
      std::min(static_cast<int>(std::ceil(stage2_fraction * n)),
               static_cast<int>(offspring.size()));
  std::vector<Genome> champion_pool;
  champion_pool.reserve(s);
  for (int idx : champions) champion_pool.push_back(population[idx]);
  std::vector<Genome> elite_offspring;
  elite_offspring.reserve(stage2);
  if (stage2 > 0) {
    const auto mating =
        tournament_select(champion_pool, tournament, 2 * stage2, rng);
    for (int q = 0; q < stage2; ++q) {
      Genome child = crossover(champion_pool[mating[2 * q]],
                               champion_pool[mating[2 * q + 1]], rng);
      child = mutate_offspring(child, rates, tracker, rng);
      elite_offspring.push_back(std::move(child));
    }
  }

  evaluate_batch(offspring, eval, generation, threads, evaluation_count,
                 step_count);
  evaluate_batch(elite_offspring, eval, generation, threads, evaluation_count,
                 step_count);

  // Drop the worst stage-1 offspring to make room for the stage-2 children.
  std::vector<int> order(offspring.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (*offspring[x].fitness != *offspring[y].fitness)
      return *offspring[x].fitness < *offspring[y].fitness;
    return x < y;
  });
  std::vector<bool> dropped(offspring.size(), false);
  for (int k = 0; k < stage2; ++k) dropped[order[k]] = true;

  std::vector<Genome> next;
  next.reserve(n);
  for (int idx : champions) next.push_back(population[idx]);
  for (std::size_t i = 0; i < offspring.size(); ++i)
    if (!dropped[i]) next.push_back(std::move(offspring[i]));
  for (auto& child : elite_offspring) next.push_back(std::move(child));
  return next;
}

RunResult run_evolution(const EvolutionConfig& cfg, const EvalFn& eval,
                        double solve_threshold, std::uint64_t seed,
                        const ReportSink& sink) {
  cfg.check();
  const int n = cfg.population_size;
  const int tournament_size = cfg.tournament_size > 0
                                  ? cfg.tournament_size
                                  : default_tournament_size(n);

  RngStream rng(derive_seed(seed, 0xa9e11ull));
  InnovationTracker tracker;
  InitConfig init{cfg.n_inputs, cfg.n_outputs, n};
  std::vector<Genome> population = init_population(init, tracker, rng);

  RunResult result;
  long evaluations = 0;
  long total_steps = 0;
  evaluate_batch(population, eval, 0, cfg.threads, evaluations, total_steps);

  DiversityController diversity_ctl(cfg.diversity, std::max(cfg.t_max, 1));
  MutationRateController mutation_ctl(cfg.adaptation);
  MutationRates rates = cfg.rates;
  rates.mu_structural = mutation_ctl.mu();

  auto population_stats = [&](double& best, double& mean) {
    best = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& g : population) {
      best = std::max(best, fitness_of(g));
      sum += fitness_of(g);
    }
    mean = sum / population.size();
  };

  double best = 0.0, mean = 0.0;
  population_stats(best, mean);
  mutation_ctl.observe(best, mean);
  double diversity_now = population_diversity(population);
  diversity_ctl.set_initial_diversity(diversity_now);

  auto report_generation = [&](int t, const std::vector<int>& sizes,
                               const TournamentConfig& tc) {
    GenerationReport report;
    report.generation = t;
    report.best_fitness = best;
    report.mean_fitness = mean;
    report.diversity = diversity_now;
    report.desired_diversity = diversity_ctl.desired(t);
    report.ratio = diversity_ctl.ratio();
    report.tournament_size = tc.tournament_size;
    report.tournament_winners = tc.winners;
    report.improvement_best = mutation_ctl.improvement_best();
    report.improvement_avg = mutation_ctl.improvement_average();
    report.mutation_rate = rates.mu_structural;
    report.species_sizes = sizes;
    report.evaluations = evaluations;
    report.total_steps = total_steps;
    result.telemetry.push_back(report);
    if (sink) sink(report);
  };

  TournamentConfig tc{tournament_size,
                      realize_winners(diversity_ctl.ratio(), tournament_size)};
  report_generation(0, {}, tc);
  result.solved = best >= solve_threshold;

  for (int t = 1; t <= cfg.t_max && !result.solved; ++t) {
    tracker.begin_generation();

    // Controllers act on the parent population's measurements (index t-1).
    diversity_ctl.update(diversity_now, t - 1);
    tc.winners = realize_winners(diversity_ctl.ratio(), tournament_size);
    rates.mu_structural = mutation_ctl.update();

    const SpeciesPartition partition = speciate(population, cfg.species_count);
    for (std::size_t i = 0; i < population.size(); ++i)
      population[i].species_id = partition.species_of[i];
    std::vector<int> sizes;
    sizes.reserve(partition.species_count());
    for (const auto& members : partition.members)
      sizes.push_back(static_cast<int>(members.size()));

    population = evolve_generation(population, partition, tc, rates,
                                   cfg.stage2_fraction, eval, t, cfg.threads,
                                   tracker, rng, evaluations, total_steps);

    population_stats(best, mean);
    mutation_ctl.observe(best, mean);
    diversity_now = population_diversity(population);

    report_generation(t, sizes, tc);
    result.solved = best >= solve_threshold;
  }

  int best_index = 0;
  for (int i = 1; i < n; ++i)
    if (fitness_of(population[i]) > fitness_of(population[best_index]))
      best_index = i;
  result.best = population[best_index];
  result.evaluations = evaluations;
  result.total_steps = total_steps;
  return result;
}

}  // namespace agent
