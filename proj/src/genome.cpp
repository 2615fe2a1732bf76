#include "agent/genome.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace agent {

namespace {

bool node_id_less(const NodeGene& a, const NodeGene& b) { return a.id < b.id; }

bool edge_key_less(const EdgeGene& a, const EdgeGene& b) {
  return std::pair(a.source, a.target) < std::pair(b.source, b.target);
}

}  // namespace

const char* to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Input: return "input";
    case NodeRole::Hidden: return "hidden";
    case NodeRole::Output: return "output";
    case NodeRole::Bias: return "bias";
  }
  return "?";
}

const char* to_string(Activation kind) {
  switch (kind) {
    case Activation::ModifiedSigmoid: return "modified_sigmoid";
    case Activation::SaturatedLinear: return "saturated_linear";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

const NodeGene* Genome::find_node(int id) const {
  NodeGene key;
  key.id = id;
  auto it = std::lower_bound(nodes.begin(), nodes.end(), key, node_id_less);
  return (it != nodes.end() && it->id == id) ? &*it : nullptr;
}

NodeGene* Genome::find_node(int id) {
  return const_cast<NodeGene*>(std::as_const(*this).find_node(id));
}

const EdgeGene* Genome::find_edge(int source, int target) const {
  EdgeGene key;
  key.source = source;
  key.target = target;
  auto it = std::lower_bound(edges.begin(), edges.end(), key, edge_key_less);
  return (it != edges.end() && it->source == source && it->target == target)
             ? &*it
             : nullptr;
}

EdgeGene* Genome::find_edge(int source, int target) {
  return const_cast<EdgeGene*>(std::as_const(*this).find_edge(source, target));
}

void Genome::insert_node(const NodeGene& node) {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), node, node_id_less);
  nodes.insert(it, node);
}

void Genome::insert_edge(const EdgeGene& edge) {
  auto it = std::lower_bound(edges.begin(), edges.end(), edge, edge_key_less);
  edges.insert(it, edge);
}

bool Genome::erase_edge(int source, int target) {
  EdgeGene key;
  key.source = source;
  key.target = target;
  auto it = std::lower_bound(edges.begin(), edges.end(), key, edge_key_less);
  if (it == edges.end() || it->source != source || it->target != target)
    return false;
  edges.erase(it);
  return true;
}

void Genome::erase_node(int id) {
  edges.erase(std::remove_if(edges.begin(), edges.end(),
                             [id](const EdgeGene& e) {
                               return e.source == id || e.target == id;
                             }),
              edges.end());
  nodes.erase(std::remove_if(nodes.begin(), nodes.end(),
                             [id](const NodeGene& n) { return n.id == id; }),
              nodes.end());
}

std::vector<int> Genome::ids_with_role(NodeRole role) const {
  std::vector<int> ids;
  for (const auto& n : nodes)
    if (n.role == role) ids.push_back(n.id);
  return ids;
}

int Genome::count_role(NodeRole role) const {
  int count = 0;
  for (const auto& n : nodes)
    if (n.role == role) ++count;
  return count;
}

std::vector<std::string> validate(const Genome& g) {
  std::vector<std::string> report;
  std::unordered_map<int, const NodeGene*> by_id;
  by_id.reserve(g.nodes.size());

  for (const auto& n : g.nodes) {
    if (!by_id.emplace(n.id, &n).second)
      report.push_back("duplicate node id " + std::to_string(n.id));
    if (n.memory < 0 || n.memory > 2)
      report.push_back("node " + std::to_string(n.id) +
                       " memory out of range: " + std::to_string(n.memory));
    if ((n.role == NodeRole::Input || n.role == NodeRole::Bias) &&
        n.memory != 0)
      report.push_back(std::string(to_string(n.role)) + " node " +
                       std::to_string(n.id) + " has nonzero memory");
  }

  std::set<std::pair<int, int>> seen_edges;
  std::unordered_map<int, std::vector<int>> out_adj;
  std::unordered_map<int, int> indegree, outdegree;
  bool endpoints_ok = true;
  for (const auto& e : g.edges) {
    bool ok = true;
    for (int endpoint : {e.source, e.target}) {
      if (!by_id.count(endpoint)) {
        report.push_back("edge " + std::to_string(e.source) + "->" +
                         std::to_string(e.target) +
                         " references unknown node " +
                         std::to_string(endpoint));
        ok = false;
      }
    }
    if (!seen_edges.emplace(e.source, e.target).second)
      report.push_back("duplicate edge " + std::to_string(e.source) + "->" +
                       std::to_string(e.target));
    if (!ok) {
      endpoints_ok = false;
      continue;
    }
    const NodeGene* target = by_id.at(e.target);
    if (target->role == NodeRole::Input || target->role == NodeRole::Bias)
      report.push_back("edge " + std::to_string(e.source) + "->" +
                       std::to_string(e.target) + " targets " +
                       to_string(target->role) + " node");
    out_adj[e.source].push_back(e.target);
    ++outdegree[e.source];
    ++indegree[e.target];
  }

  // Cycle check (Kahn). Only meaningful when all endpoints resolve.
  if (endpoints_ok) {
    std::map<int, int> pending;
    for (const auto& n : g.nodes) pending[n.id] = 0;
    for (const auto& e : g.edges) ++pending[e.target];
    std::queue<int> ready;
    for (const auto& [id, deg] : pending)
      if (deg == 0) ready.push(id);
    std::size_t processed = 0;
    while (!ready.empty()) {
      int id = ready.front();
      ready.pop();
      ++processed;
      auto it = out_adj.find(id);
      if (it == out_adj.end()) continue;
      for (int next : it->second)
        if (--pending[next] == 0) ready.push(next);
    }
    if (processed != g.nodes.size()) {
      for (const auto& [id, deg] : pending) {
        if (deg > 0) {
          report.push_back("cycle detected involving node " +
                           std::to_string(id));
          break;
        }
      }
    }

    for (const auto& n : g.nodes) {
      if (n.role != NodeRole::Hidden) continue;
      if (indegree[n.id] == 0)
        report.push_back("floating node " + std::to_string(n.id) +
                         ": no incoming edges");
      if (outdegree[n.id] == 0)
        report.push_back("floating node " + std::to_string(n.id) +
                         ": no outgoing edges");
    }

    // Every output must be reachable from an input or the bias.
    std::unordered_set<int> visited;
    std::queue<int> frontier;
    for (const auto& n : g.nodes) {
      if (n.role == NodeRole::Input || n.role == NodeRole::Bias) {
        visited.insert(n.id);
        frontier.push(n.id);
      }
    }
    while (!frontier.empty()) {
      int id = frontier.front();
      frontier.pop();
      auto it = out_adj.find(id);
      if (it == out_adj.end()) continue;
      for (int next : it->second)
        if (visited.insert(next).second) frontier.push(next);
    }
    for (const auto& n : g.nodes)
      if (n.role == NodeRole::Output && !visited.count(n.id))
        report.push_back("output node " + std::to_string(n.id) +
                         " not reachable from any input");
  }

  return report;
}

int InnovationTracker::node_id_for_split(int source, int target) {
  auto [it, inserted] = split_ids_.try_emplace({source, target}, next_id_);
  if (inserted) ++next_id_;
  return it->second;
}

double InitConfig::hidden_seed_mean() const {
  return std::sqrt(static_cast<double>(n_inputs) *
                   static_cast<double>(n_outputs));
}

void InitConfig::check() const {
  if (n_inputs < 1)
    throw std::invalid_argument("init: n_inputs must be >= 1");
  if (n_outputs < 1)
    throw std::invalid_argument("init: n_outputs must be >= 1");
  if (population_size < 4)
    throw std::invalid_argument("init: population_size must be >= 4");
}

std::vector<Genome> init_population(const InitConfig& cfg,
                                    InnovationTracker& tracker,
                                    RngStream& rng) {
  cfg.check();
  const int bias_id = cfg.n_inputs;
  const int first_output = cfg.n_inputs + 1;
  tracker.ensure_floor(first_output + cfg.n_outputs);
  const double mean_hidden = cfg.hidden_seed_mean();

  std::vector<Genome> population;
  population.reserve(cfg.population_size);
  for (int p = 0; p < cfg.population_size; ++p) {
    Genome g;
    for (int i = 0; i < cfg.n_inputs; ++i)
      g.insert_node({i, NodeRole::Input, Activation::ModifiedSigmoid, 0});
    g.insert_node({bias_id, NodeRole::Bias, Activation::ModifiedSigmoid, 0});
    for (int o = 0; o < cfg.n_outputs; ++o)
      g.insert_node({first_output + o, NodeRole::Output,
                     static_cast<Activation>(rng.uniform_int(kActivationKinds)),
                     rng.uniform_int(kMemoryKinds)});

    // Full input/bias -> output connectivity.
    for (int s = 0; s <= cfg.n_inputs; ++s)
      for (int o = 0; o < cfg.n_outputs; ++o)
        g.insert_edge({s, first_output + o, rng.uniform(-1.0, 1.0)});

    const int hidden_count = rng.poisson(mean_hidden);
    for (int h = 0; h < hidden_count; ++h) {
      const int id = tracker.fresh_node_id();
      g.insert_node({id, NodeRole::Hidden,
                     static_cast<Activation>(rng.uniform_int(kActivationKinds)),
                     rng.uniform_int(kMemoryKinds)});
      // Random nonempty subset of inputs feeding the hidden node.
      std::vector<int> in_subset;
      do {
        in_subset.clear();
        for (int i = 0; i < cfg.n_inputs; ++i)
          if (rng.bernoulli(0.5)) in_subset.push_back(i);
      } while (in_subset.empty());
      for (int i : in_subset) g.insert_edge({i, id, rng.uniform(-1.0, 1.0)});
      // Random nonempty subset of outputs fed by the hidden node.
      std::vector<int> out_subset;
      do {
        out_subset.clear();
        for (int o = 0; o < cfg.n_outputs; ++o)
          if (rng.bernoulli(0.5)) out_subset.push_back(first_output + o);
      } while (out_subset.empty());
      for (int o : out_subset) g.insert_edge({id, o, rng.uniform(-1.0, 1.0)});
    }
    population.push_back(std::move(g));
  }
  return population;
}

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " +
                                        message
                                  : message),
      line_(line) {}

namespace {

constexpr const char* kGenomeHeader = "AGENT-GENOME v1";

std::string format_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

bool parse_int(const std::string& token, int& out) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size()) return false;
    out = static_cast<int>(v);
    return out == v;
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_double(const std::string& token, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(token, &used);
    return used == token.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_role(const std::string& token, NodeRole& out) {
  for (NodeRole r : {NodeRole::Input, NodeRole::Hidden, NodeRole::Output,
                     NodeRole::Bias}) {
    if (token == to_string(r)) {
      out = r;
      return true;
    }
  }
  return false;
}

bool parse_activation(const std::string& token, Activation& out) {
  for (Activation a : {Activation::ModifiedSigmoid, Activation::SaturatedLinear,
                       Activation::Sigmoid}) {
    if (token == to_string(a)) {
      out = a;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string serialize(const Genome& g) {
  const auto report = validate(g);
  if (!report.empty())
    throw std::invalid_argument("cannot serialize invalid genome: " +
                                report.front());
  std::string out = kGenomeHeader;
  out += '\n';
  for (const auto& n : g.nodes) {
    out += "node ";
    out += std::to_string(n.id);
    out += ' ';
    out += to_string(n.role);
    out += ' ';
    const bool passthrough =
        n.role == NodeRole::Input || n.role == NodeRole::Bias;
    out += passthrough ? "none" : to_string(n.activation);
    out += ' ';
    out += std::to_string(n.memory);
    out += '\n';
  }
  for (const auto& e : g.edges) {
    out += "edge ";
    out += std::to_string(e.source);
    out += ' ';
    out += std::to_string(e.target);
    out += ' ';
    out += format_weight(e.weight);
    out += '\n';
  }
  return out;
}

Genome deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  bool saw_edge = false;
  Genome g;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!saw_header) {
      if (line != kGenomeHeader)
        throw ParseError(line_no, "expected header \"" +
                                      std::string(kGenomeHeader) + "\"");
      saw_header = true;
      continue;
    }

    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);

    if (tok[0] == "node") {
      if (saw_edge)
        throw ParseError(line_no, "node record after edge records");
      if (tok.size() != 5)
        throw ParseError(line_no, "node record needs 4 fields");
      NodeGene n;
      if (!parse_int(tok[1], n.id))
        throw ParseError(line_no, "bad node id \"" + tok[1] + "\"");
      if (!parse_role(tok[2], n.role))
        throw ParseError(line_no, "unknown role \"" + tok[2] + "\"");
      const bool passthrough =
          n.role == NodeRole::Input || n.role == NodeRole::Bias;
      if (passthrough) {
        if (tok[3] != "none")
          throw ParseError(line_no, std::string(to_string(n.role)) +
                                        " node must use activation \"none\"");
        n.activation = Activation::ModifiedSigmoid;
      } else if (!parse_activation(tok[3], n.activation)) {
        throw ParseError(line_no, "unknown activation \"" + tok[3] + "\"");
      }
      if (!parse_int(tok[4], n.memory) || n.memory < 0 || n.memory > 2)
        throw ParseError(line_no, "bad memory value \"" + tok[4] + "\"");
      if (g.has_node(n.id))
        throw ParseError(line_no, "duplicate node id " + std::to_string(n.id));
      g.insert_node(n);
    } else if (tok[0] == "edge") {
      saw_edge = true;
      if (tok.size() != 4)
        throw ParseError(line_no, "edge record needs 3 fields");
      EdgeGene e;
      if (!parse_int(tok[1], e.source))
        throw ParseError(line_no, "bad source id \"" + tok[1] + "\"");
      if (!parse_int(tok[2], e.target))
        throw ParseError(line_no, "bad target id \"" + tok[2] + "\"");
      if (!parse_double(tok[3], e.weight) || !std::isfinite(e.weight))
        throw ParseError(line_no, "bad weight \"" + tok[3] + "\"");
      for (int endpoint : {e.source, e.target})
        if (!g.has_node(endpoint))
          throw ParseError(line_no,
                           "unknown node " + std::to_string(endpoint));
      if (g.has_edge(e.source, e.target))
        throw ParseError(line_no, "duplicate edge " +
                                      std::to_string(e.source) + "->" +
                                      std::to_string(e.target));
      g.insert_edge(e);
    } else {
      throw ParseError(line_no, "unknown record kind \"" + tok[0] + "\"");
    }
  }
  if (!saw_header) throw ParseError(line_no, "missing header");

  const auto report = validate(g);
  if (!report.empty()) throw ParseError(0, "invalid genome: " + report.front());
  return g;
}

Genome load_genome_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open genome file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace agent
