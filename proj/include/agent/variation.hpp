#pragma once

#include <span>
#include <vector>

#include "agent/genome.hpp"

namespace agent {

struct TournamentConfig {
  int tournament_size = 2;  // N_T
  int winners = 1;          // N_W
  double ratio() const {
    return static_cast<double>(winners) / tournament_size;
  }
  void check() const;
};

// Structural mutation rates hang off a single controllable rate mu: an
// offspring receives an add-edge attempt with probability mu, and the other
// structural operators scale from it. Edge/node removal runs at 80% of the
// matching addition rate.
struct MutationRates {
  static constexpr double kRemovalFactor = 0.8;

  double mu_structural = 0.5;
  double sigma_weight = 0.8;
  double p_weight = 0.8;      // per-edge Gaussian weight mutation
  double p_prop = 0.05;       // per-node property switch
  double add_node_scale = 0.25;

  double add_edge_rate() const { return mu_structural; }
  double remove_edge_rate() const { return kRemovalFactor * mu_structural; }
  double add_node_rate() const { return add_node_scale * mu_structural; }
  double remove_node_rate() const {
    return kRemovalFactor * add_node_scale * mu_structural;
  }
  void check() const;
};

// Resampling tournament: repeatedly draw tournament_size genomes uniformly
// with replacement and emit the winners best of the draw, until `count`
// indices are produced (the last batch is truncated). Returns indices into
// the pool.
std::vector<int> tournament_select(std::span<const Genome> pool,
                                   const TournamentConfig& cfg, int count,
                                   RngStream& rng);

// Closed-form selection probability of the k-th ranked genome (rank 1 =
// best). Diagnostic only: the expression is an approximation and can leave
// [0, 1] (or be NaN for a negative inner term with fractional exponent);
// out-of-range results are returned verbatim for the caller to flag.
double selection_probability(int rank, int population_size,
                             int tournament_size, int winners);

// Single-child crossover. The child inherits topology and nodal properties
// from the fitter parent; weights of edges common to both parents are taken
// from either side with equal probability. Fitness ties are broken toward
// the smaller (fewer-edge) parent, then randomly.
Genome crossover(const Genome& a, const Genome& b, RngStream& rng);

// Per-edge Gaussian weight perturbation.
Genome mutate_weights(const Genome& g, const MutationRates& rates,
                      RngStream& rng);

// Inserts a new edge between an existing node pair, rejecting duplicates and
// cycles; gives up unchanged after a bounded number of attempts.
Genome add_edge(const Genome& g, RngStream& rng);

// Removes a uniformly chosen edge among those whose removal strands no
// hidden node and keeps every output reachable; unchanged if none qualifies.
Genome remove_edge(const Genome& g, RngStream& rng);

// Splits a uniformly chosen edge s->t into s->n->t. The incoming edge gets
// weight 1 and the outgoing edge inherits the split weight.
Genome add_node(const Genome& g, InnovationTracker& tracker, RngStream& rng);

// Deletes a uniformly chosen hidden node and bridges every upstream node to
// every downstream node, skipping pairs already connected; bridge weights
// are the clamped product of the two replaced weights.
Genome remove_node(const Genome& g, RngStream& rng);

// Independently resamples activation and memory of hidden/output nodes with
// probability p_prop each, always to one of the other categorical values.
Genome mutate_properties(const Genome& g, const MutationRates& rates,
                         RngStream& rng);

struct MutationCounters {
  long add_edge = 0;
  long remove_edge = 0;
  long add_node = 0;
  long remove_node = 0;
};

// Full offspring mutation pipeline: structural operators drawn independently
// at their coupled rates, then weight and property mutation. Counters (when
// given) record how often each structural operator was attempted.
Genome mutate_offspring(const Genome& g, const MutationRates& rates,
                        InnovationTracker& tracker, RngStream& rng,
                        MutationCounters* counters = nullptr);

}  // namespace agent
