#include "agent/network.hpp"

#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace agent {

Phenotype Phenotype::compile(const Genome& g, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("compile: dt must be positive");
  const auto report = validate(g);
  if (!report.empty())
    throw std::invalid_argument("compile: invalid genome: " + report.front());

  // Kahn's algorithm, always expanding the smallest ready id so the order is
  // deterministic.
  std::map<int, int> pending;
  std::map<int, std::vector<int>> out_adj;
  for (const auto& n : g.nodes) pending[n.id] = 0;
  for (const auto& e : g.edges) {
    ++pending[e.target];
    out_adj[e.source].push_back(e.target);
  }
  std::set<int> ready;
  for (const auto& [id, deg] : pending)
    if (deg == 0) ready.insert(id);

  Phenotype p;
  p.dt_ = dt;
  p.nodes_.reserve(g.nodes.size());
  while (!ready.empty()) {
    const int id = *ready.begin();
    ready.erase(ready.begin());
    const NodeGene* gene = g.find_node(id);
    Node node;
    node.id = id;
    node.role = gene->role;
    node.activation = gene->activation;
    node.memory = gene->memory;
    p.slot_by_id_[id] = static_cast<int>(p.nodes_.size());
    p.nodes_.push_back(std::move(node));
    p.topo_ids_.push_back(id);
    auto it = out_adj.find(id);
    if (it == out_adj.end()) continue;
    for (int next : it->second)
      if (--pending[next] == 0) ready.insert(next);
  }

  for (const auto& e : g.edges)
    p.nodes_[p.slot_by_id_.at(e.target)].incoming.emplace_back(
        p.slot_by_id_.at(e.source), e.weight);

  for (auto& node : p.nodes_)
    std::sort(node.incoming.begin(), node.incoming.end());

  // Inputs and outputs are exposed in ascending node-id order.
  std::map<int, int> input_ids, output_ids;
  for (const auto& [id, slot] : p.slot_by_id_) {
    const NodeRole role = p.nodes_[slot].role;
    if (role == NodeRole::Input) input_ids[id] = slot;
    if (role == NodeRole::Output) output_ids[id] = slot;
  }
  int k = 0;
  for (const auto& [id, slot] : input_ids) {
    p.nodes_[slot].input_index = k++;
    p.input_slots_.push_back(slot);
  }
  for (const auto& [id, slot] : output_ids) p.output_slots_.push_back(slot);
  return p;
}

void Phenotype::reset() {
  for (auto& n : nodes_) {
    n.value = 0.0;
    n.net_input = 0.0;
    n.preactivation = 0.0;
    n.prev_net = 0.0;
    n.prev_prev_net = 0.0;
  }
}

std::vector<double> Phenotype::step(std::span<const double> inputs) {
  if (static_cast<int>(inputs.size()) != n_inputs())
    throw std::invalid_argument(
        "step: expected " + std::to_string(n_inputs()) + " inputs, got " +
        std::to_string(inputs.size()));
  for (double v : inputs)
    if (!std::isfinite(v))
      throw std::invalid_argument("step: non-finite input value");

  for (auto& node : nodes_) {
    if (node.role == NodeRole::Input) {
      node.value = inputs[node.input_index];
      continue;
    }
    if (node.role == NodeRole::Bias) {
      node.value = 1.0;
      continue;
    }
    double u = 0.0;
    for (const auto& [slot, weight] : node.incoming)
      u += weight * nodes_[slot].value;
    double v = u;
    if (node.memory == 1) {
      v = (u - node.prev_net) / dt_;
    } else if (node.memory == 2) {
      v = (u - 2.0 * node.prev_net + node.prev_prev_net) / (dt_ * dt_);
    }
    if (!std::isfinite(u) || !std::isfinite(v))
      throw std::runtime_error("step: non-finite net input at node " +
                               std::to_string(node.id));
    node.prev_prev_net = node.prev_net;
    node.prev_net = u;
    node.net_input = u;
    node.preactivation = v;
    node.value = apply_activation(node.activation, v);
    if (!std::isfinite(node.value))
      throw std::runtime_error("step: non-finite value at node " +
                               std::to_string(node.id));
  }

  std::vector<double> outputs;
  outputs.reserve(output_slots_.size());
  for (int slot : output_slots_) outputs.push_back(nodes_[slot].value);
  return outputs;
}

std::vector<Activation> Phenotype::output_activations() const {
  std::vector<Activation> kinds;
  kinds.reserve(output_slots_.size());
  for (int slot : output_slots_) kinds.push_back(nodes_[slot].activation);
  return kinds;
}

int Phenotype::slot_of(int node_id) const {
  auto it = slot_by_id_.find(node_id);
  if (it == slot_by_id_.end())
    throw std::invalid_argument("unknown node id " + std::to_string(node_id));
  return it->second;
}

double Phenotype::last_net_input(int node_id) const {
  return nodes_[slot_of(node_id)].net_input;
}

double Phenotype::last_preactivation(int node_id) const {
  return nodes_[slot_of(node_id)].preactivation;
}

double Phenotype::node_value(int node_id) const {
  return nodes_[slot_of(node_id)].value;
}

}  // namespace agent
