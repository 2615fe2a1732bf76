#include "agent/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace agent {

int node_type_index(const NodeGene& node) {
  switch (node.role) {
    case NodeRole::Input:
    case NodeRole::Bias:
      return 0;
    case NodeRole::Hidden:
      return 1 + static_cast<int>(node.activation) * kMemoryKinds +
             node.memory;
    case NodeRole::Output:
      return 1 + kActivationKinds * kMemoryKinds +
             static_cast<int>(node.activation) * kMemoryKinds + node.memory;
  }
  return 0;
}

TypeCounts type_counts(const Genome& g) {
  TypeCounts counts;
  std::unordered_map<int, int> type_of;
  type_of.reserve(g.nodes.size());
  for (const auto& n : g.nodes) {
    const int t = node_type_index(n);
    ++counts.nodes[t];
    type_of.emplace(n.id, t);
  }
  for (const auto& e : g.edges)
    ++counts.edges[type_of.at(e.source) * kTypeBuckets + type_of.at(e.target)];
  return counts;
}

double type_distance(const TypeCounts& a, const TypeCounts& b) {
  int node_diff = 0;
  for (int i = 0; i < kTypeBuckets; ++i)
    node_diff += std::abs(a.nodes[i] - b.nodes[i]);
  int edge_diff = 0;
  for (int i = 0; i < kTypeBuckets * kTypeBuckets; ++i)
    edge_diff += std::abs(a.edges[i] - b.edges[i]);
  return kAlphaNodes * node_diff + kAlphaEdges * edge_diff;
}

double genome_distance(const Genome& a, const Genome& b) {
  return type_distance(type_counts(a), type_counts(b));
}

namespace {

// Union-find with path compression and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

struct PairEdge {
  double length;
  int a;
  int b;
};

}  // namespace

double population_diversity(std::span<const TypeCounts> counts) {
  const int n = static_cast<int>(counts.size());
  if (n < 2)
    throw std::invalid_argument("population_diversity needs at least 2 genomes");

  std::vector<PairEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      edges.push_back({type_distance(counts[i], counts[j]), i, j});

  std::sort(edges.begin(), edges.end(), [](const PairEdge& x, const PairEdge& y) {
    if (x.length != y.length) return x.length < y.length;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  DisjointSets sets(n);
  double total = 0.0;
  int used = 0;
  for (const auto& e : edges) {
    if (!sets.unite(e.a, e.b)) continue;
    total += e.length;
    if (++used == n - 1) break;
  }
  return total;
}

double population_diversity(std::span<const Genome> population) {
  std::vector<TypeCounts> counts;
  counts.reserve(population.size());
  for (const auto& g : population) counts.push_back(type_counts(g));
  return population_diversity(std::span<const TypeCounts>(counts));
}

double desired_diversity(double d_init, double beta_div, int t_max, int t) {
  if (beta_div < 1.0)
    throw std::invalid_argument("desired_diversity: beta_div must be >= 1");
  if (t_max < 1)
    throw std::invalid_argument("desired_diversity: t_max must be >= 1");
  if (t < 0 || t > t_max)
    throw std::invalid_argument("desired_diversity: t out of range");
  const double horizon = beta_div * static_cast<double>(t_max);
  return d_init * (horizon - static_cast<double>(t)) / horizon;
}

double update_ratio(double prev_ratio, double diversity, double desired,
                    double gain, double ratio_min, double ratio_max) {
  const double next = prev_ratio * std::exp(-gain * (diversity - desired));
  return std::clamp(next, ratio_min, ratio_max);
}

int realize_winners(double ratio, int tournament_size) {
  const int winners = static_cast<int>(std::lround(ratio * tournament_size));
  return std::clamp(winners, 1, tournament_size);
}

int default_tournament_size(int population_size) {
  return std::max(2, static_cast<int>(std::lround(0.05 * population_size)));
}

void DiversityConfig::check() const {
  if (!(gain > 0.0))
    throw std::invalid_argument("diversity: gain must be positive");
  if (beta_div < 1.0)
    throw std::invalid_argument("diversity: beta_div must be >= 1");
  if (!(ratio_min > 0.0) || ratio_min > ratio_max || ratio_max > 1.0)
    throw std::invalid_argument("diversity: ratio bounds must satisfy 0 < min <= max <= 1");
  if (initial_ratio < ratio_min || initial_ratio > ratio_max)
    throw std::invalid_argument("diversity: initial_ratio outside ratio bounds");
}

DiversityController::DiversityController(const DiversityConfig& cfg, int t_max)
    : cfg_(cfg), t_max_(t_max), ratio_(cfg.initial_ratio) {
  cfg_.check();
  if (t_max_ < 1) t_max_ = 1;
}

void DiversityController::set_initial_diversity(double d_init) {
  d_init_ = d_init;
  initialized_ = true;
}

double DiversityController::desired(int t) const {
  if (!initialized_)
    throw std::logic_error("diversity controller not initialized");
  return desired_diversity(d_init_, cfg_.beta_div, t_max_, t);
}

double DiversityController::update(double diversity, int t) {
  if (!cfg_.enabled) return ratio_;
  ratio_ = update_ratio(ratio_, diversity, desired(t), cfg_.gain,
                        cfg_.ratio_min, cfg_.ratio_max);
  return ratio_;
}

}  // namespace agent
