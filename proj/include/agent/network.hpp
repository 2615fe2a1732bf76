#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <unordered_map>
#include <vector>

#include "agent/genome.hpp"

namespace agent {

inline double apply_activation(Activation kind, double x) {
  switch (kind) {
    case Activation::ModifiedSigmoid:
      return 1.0 / (1.0 + std::exp(-4.9 * x));
    case Activation::SaturatedLinear:
      return std::clamp(x, -1.0, 1.0);
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
  }
  return 0.0;
}

// Executable form of a genome: nodes flattened in topological order with
// per-node net-input history for the temporal-difference memory modes.
//
// For each non-input node i at step tau:
//   U_i = sum over incoming (w_ji * f_j)
//   V_i = U_i                                         (M = 0)
//       = (U_i - U_i(tau-1)) / dt                     (M = 1)
//       = (U_i - 2 U_i(tau-1) + U_i(tau-2)) / dt^2    (M = 2)
//   f_i = activation(V_i)
// History is zeroed at reset, so M=1/M=2 nodes emit a warm-up transient on
// the first steps of an episode.
class Phenotype {
 public:
  static Phenotype compile(const Genome& g, double dt);

  void reset();
  std::vector<double> step(std::span<const double> inputs);

  int n_inputs() const { return static_cast<int>(input_slots_.size()); }
  int n_outputs() const { return static_cast<int>(output_slots_.size()); }
  double dt() const { return dt_; }
  const std::vector<int>& topo_order() const { return topo_ids_; }
  std::vector<Activation> output_activations() const;

  // Instrumentation (last completed step), used by diagnostics and tests.
  double last_net_input(int node_id) const;      // U_i
  double last_preactivation(int node_id) const;  // V_i
  double node_value(int node_id) const;          // f_i

 private:
  struct Node {
    int id = 0;
    NodeRole role = NodeRole::Hidden;
    Activation activation = Activation::ModifiedSigmoid;
    int memory = 0;
    int input_index = -1;  // position in the input vector, if role == Input
    std::vector<std::pair<int, double>> incoming;  // (slot, weight)
    double value = 0.0;
    double net_input = 0.0;       // U(tau)
    double preactivation = 0.0;   // V(tau)
    double prev_net = 0.0;        // U(tau-1)
    double prev_prev_net = 0.0;   // U(tau-2)
  };

  int slot_of(int node_id) const;

  std::vector<Node> nodes_;  // topological order
  std::vector<int> topo_ids_;
  std::vector<int> input_slots_;   // input nodes in ascending id order
  std::vector<int> output_slots_;  // output nodes in ascending id order
  std::unordered_map<int, int> slot_by_id_;
  double dt_ = 1.0;
};

}  // namespace agent
