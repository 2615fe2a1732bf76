#pragma once

#include <array>
#include <span>
#include <vector>

#include "agent/genome.hpp"

namespace agent {

// Node type buckets for the structural distance: one bucket for inputs and
// the bias, plus (role in {hidden, output}) x 3 activations x 3 memory
// values.
inline constexpr int kTypeBuckets = 1 + 2 * kActivationKinds * kMemoryKinds;

inline constexpr double kAlphaNodes = 0.5;
inline constexpr double kAlphaEdges = 0.5;

int node_type_index(const NodeGene& node);

struct TypeCounts {
  std::array<int, kTypeBuckets> nodes{};
  std::array<int, kTypeBuckets * kTypeBuckets> edges{};
};

TypeCounts type_counts(const Genome& g);

// Weighted L1 distance between the node-type and edge-type histograms.
double type_distance(const TypeCounts& a, const TypeCounts& b);
double genome_distance(const Genome& a, const Genome& b);

// Total length of the minimum spanning tree over the complete
// pairwise-distance graph (Kruskal, ties broken by vertex-index pair).
double population_diversity(std::span<const Genome> population);
double population_diversity(std::span<const TypeCounts> counts);

// Linearly decaying diversity target, anchored at the measured initial value.
double desired_diversity(double d_init, double beta_div, int t_max, int t);

// Exponential tournament-ratio update: diversity above target raises
// selection pressure (smaller ratio), below target relaxes it.
double update_ratio(double prev_ratio, double diversity, double desired,
                    double gain, double ratio_min = 0.02,
                    double ratio_max = 1.0);

// Integer realization of the winners count for a given ratio.
int realize_winners(double ratio, int tournament_size);

// Default tournament size: 5% of the population, at least 2.
int default_tournament_size(int population_size);

struct DiversityConfig {
  bool enabled = true;
  double initial_ratio = 1.0;  // start pressure-free; the controller tightens
  double beta_div = 1.5;
  double gain = 0.1;  // K_D
  double ratio_min = 0.02;
  double ratio_max = 1.0;
  void check() const;
};

// Per-run controller state for the tournament-ratio loop.
class DiversityController {
 public:
  DiversityController(const DiversityConfig& cfg, int t_max);

  void set_initial_diversity(double d_init);
  double desired(int t) const;
  // Applies the ratio update for generation t; no-op (fixed ratio) when the
  // controller is disabled.
  double update(double diversity, int t);

  double ratio() const { return ratio_; }
  double initial_diversity() const { return d_init_; }

 private:
  DiversityConfig cfg_;
  int t_max_;
  double d_init_ = 0.0;
  bool initialized_ = false;
  double ratio_;
};

}  // namespace agent
