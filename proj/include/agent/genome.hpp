#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "agent/rng.hpp"

namespace agent {

enum class NodeRole { Input, Hidden, Output, Bias };
enum class Activation { ModifiedSigmoid, SaturatedLinear, Sigmoid };

inline constexpr int kActivationKinds = 3;
inline constexpr int kMemoryKinds = 3;  // M in {0, 1, 2}

const char* to_string(NodeRole role);
const char* to_string(Activation kind);

struct NodeGene {
  int id = 0;
  NodeRole role = NodeRole::Hidden;
  // Activation is meaningful for hidden/output nodes only; input and bias
  // nodes pass their value through unchanged and keep the canonical default.
  Activation activation = Activation::ModifiedSigmoid;
  int memory = 0;  // 0 = raw input, 1/2 = first/second temporal difference
};

struct EdgeGene {
  int source = 0;
  int target = 0;
  double weight = 0.0;
  bool enabled = true;  // reserved; always true, not serialized
};

// Direct encoding of a feedforward network. Nodes are kept sorted by id and
// edges by (source, target) so iteration, serialization and crossover
// matching are deterministic. Treated as an immutable value once built; the
// variation operators always return fresh copies.
struct Genome {
  std::vector<NodeGene> nodes;
  std::vector<EdgeGene> edges;
  std::optional<double> fitness;
  std::optional<int> species_id;

  const NodeGene* find_node(int id) const;
  NodeGene* find_node(int id);
  const EdgeGene* find_edge(int source, int target) const;
  EdgeGene* find_edge(int source, int target);
  bool has_node(int id) const { return find_node(id) != nullptr; }
  bool has_edge(int source, int target) const {
    return find_edge(source, target) != nullptr;
  }
  void insert_node(const NodeGene& node);
  void insert_edge(const EdgeGene& edge);
  bool erase_edge(int source, int target);
  void erase_node(int id);  // also drops incident edges

  std::vector<int> ids_with_role(NodeRole role) const;
  int count_role(NodeRole role) const;
};

// Returns every violated structural invariant; empty means valid.
std::vector<std::string> validate(const Genome& g);
inline bool is_valid(const Genome& g) { return validate(g).empty(); }

// Issues node ids. Splitting the same edge twice within one generation yields
// the same id, so structurally identical mutations stay matchable as common
// edges in crossover.
class InnovationTracker {
 public:
  explicit InnovationTracker(int first_id = 0) : next_id_(first_id) {}

  void ensure_floor(int first_free_id) {
    if (next_id_ < first_free_id) next_id_ = first_free_id;
  }
  void begin_generation() { split_ids_.clear(); }
  int fresh_node_id() { return next_id_++; }
  int node_id_for_split(int source, int target);
  int next_id() const { return next_id_; }

 private:
  int next_id_ = 0;
  std::map<std::pair<int, int>, int> split_ids_;
};

struct InitConfig {
  int n_inputs = 1;
  int n_outputs = 1;
  int population_size = 4;

  double hidden_seed_mean() const;
  void check() const;  // throws std::invalid_argument on bad dimensions
};

// Seeds a population: fixed input/bias/output ids shared by every genome,
// per-genome Poisson-distributed hidden node count, full input+bias -> output
// connectivity and random nonempty hidden fan-in/fan-out.
std::vector<Genome> init_population(const InitConfig& cfg,
                                    InnovationTracker& tracker,
                                    RngStream& rng);

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

// Text form: header "AGENT-GENOME v1", then one "node <id> <role>
// <activation> <memory>" line per node (id order), then one
// "edge <src> <dst> <weight>" line per edge ((src,dst) order). Weights are
// written with 17 significant digits so the round trip is lossless.
std::string serialize(const Genome& g);
Genome deserialize(const std::string& text);

Genome load_genome_file(const std::string& path);

}  // namespace agent
