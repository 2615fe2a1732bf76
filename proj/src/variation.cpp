#include "agent/variation.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace agent {

namespace {

constexpr int kAddEdgeAttempts = 32;

double fitness_of(const Genome& g, const char* who) {
  if (!g.fitness)
    throw std::logic_error(std::string(who) + ": genome has no fitness");
  return *g.fitness;
}

// True when `to` is reachable from `from` along directed edges.
bool path_exists(const Genome& g, int from, int to) {
  if (from == to) return true;
  std::unordered_map<int, std::vector<int>> adj;
  for (const auto& e : g.edges) adj[e.source].push_back(e.target);
  std::unordered_set<int> visited{from};
  std::queue<int> frontier;
  frontier.push(from);
  while (!frontier.empty()) {
    const int id = frontier.front();
    frontier.pop();
    auto it = adj.find(id);
    if (it == adj.end()) continue;
    for (int next : it->second) {
      if (next == to) return true;
      if (visited.insert(next).second) frontier.push(next);
    }
  }
  return false;
}

// True when every output stays reachable from the inputs/bias if the edge at
// `skip_index` is ignored.
bool outputs_reachable_without(const Genome& g, std::size_t skip_index) {
  std::unordered_map<int, std::vector<int>> adj;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (i == skip_index) continue;
    adj[g.edges[i].source].push_back(g.edges[i].target);
  }
  std::unordered_set<int> visited;
  std::queue<int> frontier;
  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::Input || n.role == NodeRole::Bias) {
      visited.insert(n.id);
      frontier.push(n.id);
    }
  }
  while (!frontier.empty()) {
    const int id = frontier.front();
    frontier.pop();
    auto it = adj.find(id);
    if (it == adj.end()) continue;
    for (int next : it->second)
      if (visited.insert(next).second) frontier.push(next);
  }
  for (const auto& n : g.nodes)
    if (n.role == NodeRole::Output && !visited.count(n.id)) return false;
  return true;
}

Activation other_activation(Activation current, int pick) {
  int k = 0;
  for (int i = 0; i < kActivationKinds; ++i) {
    if (i == static_cast<int>(current)) continue;
    if (k++ == pick) return static_cast<Activation>(i);
  }
  return current;
}

int other_memory(int current, int pick) {
  int k = 0;
  for (int m = 0; m < kMemoryKinds; ++m) {
    if (m == current) continue;
    if (k++ == pick) return m;
  }
  return current;
}

}  // namespace

void TournamentConfig::check() const {
  if (tournament_size < 2)
    throw std::invalid_argument("tournament: size must be >= 2");
  if (winners < 1 || winners > tournament_size)
    throw std::invalid_argument("tournament: winners must be in [1, size]");
}

void MutationRates::check() const {
  for (double p : {mu_structural, p_weight, p_prop})
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("mutation: probabilities must be in [0, 1]");
  if (!(sigma_weight > 0.0))
    throw std::invalid_argument("mutation: sigma_weight must be positive");
  if (add_node_scale < 0.0 || add_node_scale * mu_structural > 1.0)
    throw std::invalid_argument("mutation: add_node_scale out of range");
}

std::vector<int> tournament_select(std::span<const Genome> pool,
                                   const TournamentConfig& cfg, int count,
                                   RngStream& rng) {
  cfg.check();
  if (pool.empty())
    throw std::invalid_argument("tournament_select: empty pool");
  if (count < 0)
    throw std::invalid_argument("tournament_select: negative count");
  std::vector<double> fitness(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    fitness[i] = fitness_of(pool[i], "tournament_select");

  std::vector<int> selected;
  selected.reserve(count);
  std::vector<int> draw(cfg.tournament_size);
  while (static_cast<int>(selected.size()) < count) {
    for (int& d : draw) d = rng.uniform_int(static_cast<int>(pool.size()));
    std::sort(draw.begin(), draw.end(), [&](int x, int y) {
      if (fitness[x] != fitness[y]) return fitness[x] > fitness[y];
      return x < y;
    });
    const int take = std::min<int>(cfg.winners,
                                   count - static_cast<int>(selected.size()));
    selected.insert(selected.end(), draw.begin(), draw.begin() + take);
  }
  return selected;
}

double selection_probability(int rank, int population_size,
                             int tournament_size, int winners) {
  TournamentConfig{tournament_size, winners}.check();
  if (rank < 1 || rank > population_size)
    throw std::invalid_argument("selection_probability: rank out of range");

  double binom = 1.0;
  for (int i = 1; i <= winners; ++i)
    binom = binom * (tournament_size - winners + i) / i;

  const double n = static_cast<double>(population_size);
  const double loss = std::pow((n - rank) / n, winners);
  const double inner = 1.0 - binom * loss;
  return std::pow(inner, 2.0 * n / winners);
}

Genome crossover(const Genome& a, const Genome& b, RngStream& rng) {
  const double fa = fitness_of(a, "crossover");
  const double fb = fitness_of(b, "crossover");
  const Genome* fitter = nullptr;
  const Genome* other = nullptr;
  if (fa != fb) {
    fitter = fa > fb ? &a : &b;
  } else if (a.edges.size() != b.edges.size()) {
    fitter = a.edges.size() < b.edges.size() ? &a : &b;
  } else {
    fitter = rng.bernoulli(0.5) ? &a : &b;
  }
  other = (fitter == &a) ? &b : &a;

  Genome child;
  child.nodes = fitter->nodes;
  child.edges = fitter->edges;
  for (auto& e : child.edges) {
    const EdgeGene* match = other->find_edge(e.source, e.target);
    if (match && !rng.bernoulli(0.5)) e.weight = match->weight;
  }
  return child;
}

Genome mutate_weights(const Genome& g, const MutationRates& rates,
                      RngStream& rng) {
  Genome out = g;
  out.fitness.reset();
  for (auto& e : out.edges)
    if (rng.bernoulli(rates.p_weight))
      e.weight += rng.normal(0.0, rates.sigma_weight);
  return out;
}

Genome add_edge(const Genome& g, RngStream& rng) {
  std::vector<int> sources;
  std::vector<int> targets;
  for (const auto& n : g.nodes) {
    if (n.role != NodeRole::Output) sources.push_back(n.id);
    if (n.role == NodeRole::Hidden || n.role == NodeRole::Output)
      targets.push_back(n.id);
  }
  if (sources.empty() || targets.empty()) return g;

  for (int attempt = 0; attempt < kAddEdgeAttempts; ++attempt) {
    const int s = sources[rng.uniform_int(static_cast<int>(sources.size()))];
    const int t = targets[rng.uniform_int(static_cast<int>(targets.size()))];
    if (s == t) continue;
    if (g.has_edge(s, t)) continue;
    if (path_exists(g, t, s)) continue;  // would close a cycle
    Genome out = g;
    out.fitness.reset();
    out.insert_edge({s, t, rng.uniform(-1.0, 1.0)});
    return out;
  }
  return g;
}

Genome remove_edge(const Genome& g, RngStream& rng) {
  std::unordered_map<int, int> indegree, outdegree;
  std::unordered_map<int, NodeRole> role;
  for (const auto& n : g.nodes) role[n.id] = n.role;
  for (const auto& e : g.edges) {
    ++outdegree[e.source];
    ++indegree[e.target];
  }

  std::vector<std::size_t> deletable;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    if (role[e.source] == NodeRole::Hidden && outdegree[e.source] <= 1)
      continue;
    if (role[e.target] == NodeRole::Hidden && indegree[e.target] <= 1)
      continue;
    if (!outputs_reachable_without(g, i)) continue;
    deletable.push_back(i);
  }
  if (deletable.empty()) return g;

  const auto& victim =
      g.edges[deletable[rng.uniform_int(static_cast<int>(deletable.size()))]];
  Genome out = g;
  out.fitness.reset();
  out.erase_edge(victim.source, victim.target);
  return out;
}

Genome add_node(const Genome& g, InnovationTracker& tracker, RngStream& rng) {
  if (g.edges.empty()) return g;
  const EdgeGene split = g.edges[rng.uniform_int(static_cast<int>(g.edges.size()))];
  int id = tracker.node_id_for_split(split.source, split.target);
  if (g.has_node(id)) id = tracker.fresh_node_id();

  Genome out = g;
  out.fitness.reset();
  out.erase_edge(split.source, split.target);
  out.insert_node({id, NodeRole::Hidden,
                   static_cast<Activation>(rng.uniform_int(kActivationKinds)),
                   rng.uniform_int(kMemoryKinds)});
  out.insert_edge({split.source, id, 1.0});
  out.insert_edge({id, split.target, split.weight});
  return out;
}

Genome remove_node(const Genome& g, RngStream& rng) {
  const std::vector<int> hidden = g.ids_with_role(NodeRole::Hidden);
  if (hidden.empty()) return g;
  const int victim = hidden[rng.uniform_int(static_cast<int>(hidden.size()))];

  std::vector<std::pair<int, double>> upstream;    // (source, weight)
  std::vector<std::pair<int, double>> downstream;  // (target, weight)
  for (const auto& e : g.edges) {
    if (e.target == victim) upstream.emplace_back(e.source, e.weight);
    if (e.source == victim) downstream.emplace_back(e.target, e.weight);
  }
  std::sort(upstream.begin(), upstream.end());
  std::sort(downstream.begin(), downstream.end());

  Genome out = g;
  out.fitness.reset();
  out.erase_node(victim);
  for (const auto& [u, wu] : upstream) {
    for (const auto& [d, wd] : downstream) {
      if (u == d) continue;
      if (out.has_edge(u, d)) continue;
      if (path_exists(out, d, u)) continue;
      out.insert_edge({u, d, std::clamp(wu * wd, -1.0, 1.0)});
    }
  }
  return out;
}

Genome mutate_properties(const Genome& g, const MutationRates& rates,
                         RngStream& rng) {
  Genome out = g;
  out.fitness.reset();
  for (auto& n : out.nodes) {
    if (n.role != NodeRole::Hidden && n.role != NodeRole::Output) continue;
    if (rng.bernoulli(rates.p_prop))
      n.activation = other_activation(n.activation,
                                      rng.uniform_int(kActivationKinds - 1));
    if (rng.bernoulli(rates.p_prop))
      n.memory = other_memory(n.memory, rng.uniform_int(kMemoryKinds - 1));
  }
  return out;
}

Genome mutate_offspring(const Genome& g, const MutationRates& rates,
                        InnovationTracker& tracker, RngStream& rng,
                        MutationCounters* counters) {
  rates.check();
  Genome out = g;
  if (rng.bernoulli(rates.add_edge_rate())) {
    if (counters) ++counters->add_edge;
    out = add_edge(out, rng);
  }
  if (rng.bernoulli(rates.remove_edge_rate())) {
    if (counters) ++counters->remove_edge;
    out = remove_edge(out, rng);
  }
  if (rng.bernoulli(rates.add_node_rate())) {
    if (counters) ++counters->add_node;
    out = add_node(out, tracker, rng);
  }
  if (rng.bernoulli(rates.remove_node_rate())) {
    if (counters) ++counters->remove_node;
    out = remove_node(out, rng);
  }
  out = mutate_weights(out, rates, rng);
  out = mutate_properties(out, rates, rng);
  out.fitness.reset();
  out.species_id.reset();
  return out;
}

}  // namespace agent
