#include <cmath>
#include <vector>

#include "agent/network.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agent;

namespace {

// input(0), bias(1), output(2) with a single weighted edge input -> output.
Genome single_edge_genome(Activation out_kind, int out_memory, double weight) {
  Genome g;
  g.insert_node({0, NodeRole::Input, Activation::ModifiedSigmoid, 0});
  g.insert_node({1, NodeRole::Bias, Activation::ModifiedSigmoid, 0});
  g.insert_node({2, NodeRole::Output, out_kind, out_memory});
  g.insert_edge({0, 2, weight});
  return g;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("compile orders a chain topologically") {
  Genome g;
  g.insert_node({0, NodeRole::Input, Activation::ModifiedSigmoid, 0});
  g.insert_node({1, NodeRole::Bias, Activation::ModifiedSigmoid, 0});
  g.insert_node({2, NodeRole::Output, Activation::Sigmoid, 0});
  g.insert_node({3, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_edge({0, 3, 1.0});
  g.insert_edge({3, 2, 1.0});
  const Phenotype net = Phenotype::compile(g, 1.0);
  const auto& order = net.topo_order();
  const auto pos = [&](int id) {
    return std::find(order.begin(), order.end(), id) - order.begin();
  };
  CHECK(pos(0) < pos(3));
  CHECK(pos(3) < pos(2));
}

TEST_CASE("compile respects the diamond partial order") {
  Genome g;
  g.insert_node({0, NodeRole::Input, Activation::ModifiedSigmoid, 0});
  g.insert_node({1, NodeRole::Bias, Activation::ModifiedSigmoid, 0});
  g.insert_node({2, NodeRole::Output, Activation::Sigmoid, 0});
  g.insert_node({3, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_node({4, NodeRole::Hidden, Activation::SaturatedLinear, 0});
  g.insert_edge({0, 3, 1.0});
  g.insert_edge({0, 4, 1.0});
  g.insert_edge({3, 2, 1.0});
  g.insert_edge({4, 2, 1.0});
  const Phenotype net = Phenotype::compile(g, 1.0);
  const auto& order = net.topo_order();
  const auto pos = [&](int id) {
    return std::find(order.begin(), order.end(), id) - order.begin();
  };
  CHECK(pos(0) < pos(3));
  CHECK(pos(0) < pos(4));
  CHECK(pos(3) < pos(2));
  CHECK(pos(4) < pos(2));
}

TEST_CASE("compile rejects cyclic genomes and bad dt") {
  Genome g = single_edge_genome(Activation::Sigmoid, 0, 1.0);
  g.insert_node({3, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_node({4, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_edge({0, 3, 1.0});
  g.insert_edge({3, 4, 1.0});
  g.insert_edge({4, 3, 1.0});
  g.insert_edge({4, 2, 1.0});
  CHECK_THROWS_AS(Phenotype::compile(g, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      Phenotype::compile(single_edge_genome(Activation::Sigmoid, 0, 1.0), 0.0),
      std::invalid_argument);
}

TEST_CASE("memoryless node applies the activation to the net input") {
  // M=0, single incoming weight 1.0, upstream value 0.7, sigmoid
  Phenotype net =
      Phenotype::compile(single_edge_genome(Activation::Sigmoid, 0, 1.0), 1.0);
  const auto out = net.step(std::vector<double>{0.7});
  REQUIRE(out.size() == 1);
  CHECK(out[0] == 1.0 / (1.0 + std::exp(-0.7)));
  CHECK(out[0] == doctest::Approx(0.66819).epsilon(1e-4));
  CHECK(net.last_net_input(2) == 0.7);
}

TEST_CASE("first-difference memory divides by the time step") {
  // M=1, dt=0.1, U sequence 0.0 then 0.5 -> V = 5.0
  Phenotype net = Phenotype::compile(
      single_edge_genome(Activation::SaturatedLinear, 1, 1.0), 0.1);
  net.step(std::vector<double>{0.0});
  CHECK(net.last_preactivation(2) == 0.0);
  net.step(std::vector<double>{0.5});
  CHECK(net.last_preactivation(2) == 5.0);
}

TEST_CASE("second-difference memory matches the difference quotient") {
  // M=2, dt=1, U sequence 1, 2, 4 -> V = 4 - 2*2 + 1 = 1
  Phenotype net = Phenotype::compile(
      single_edge_genome(Activation::SaturatedLinear, 2, 1.0), 1.0);
  net.step(std::vector<double>{1.0});
  net.step(std::vector<double>{2.0});
  net.step(std::vector<double>{4.0});
  CHECK(net.last_preactivation(2) == 1.0);
}

TEST_CASE("reset is idempotent and restores the compiled state") {
  InnovationTracker tracker;
  RngStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Genome g = test_util::random_genome(rng, tracker);
    Phenotype a = Phenotype::compile(g, 0.5);
    Phenotype b = Phenotype::compile(g, 0.5);

    std::vector<std::vector<double>> sequence;
    for (int s = 0; s < 5; ++s) {
      std::vector<double> inputs(a.n_inputs());
      for (auto& v : inputs) v = rng.uniform(-2.0, 2.0);
      sequence.push_back(inputs);
    }

    std::vector<std::vector<double>> first;
    for (const auto& inputs : sequence) first.push_back(a.step(inputs));
    a.reset();
    a.reset();  // twice == once
    for (std::size_t s = 0; s < sequence.size(); ++s) {
      const auto replay = a.step(sequence[s]);
      const auto fresh = b.step(sequence[s]);
      CHECK(replay == first[s]);
      CHECK(fresh == first[s]);
    }
  }
}

TEST_CASE("memory modes equal difference quotients of the instrumented net input") {
  InnovationTracker tracker;
  RngStream rng(9);
  const double dt = 0.25;
  for (int trial = 0; trial < 50; ++trial) {
    const Genome g = test_util::random_genome(rng, tracker);
    Phenotype net = Phenotype::compile(g, dt);
    std::vector<int> watched;
    for (const auto& n : g.nodes)
      if (n.memory > 0) watched.push_back(n.id);

    std::map<int, std::vector<double>> u_history;
    for (int s = 0; s < 8; ++s) {
      std::vector<double> inputs(net.n_inputs());
      for (auto& v : inputs) v = rng.uniform(-1.0, 1.0);
      net.step(inputs);
      for (int id : watched) {
        const double u = net.last_net_input(id);
        const auto& hist = u_history[id];
        const double u1 = hist.size() >= 1 ? hist[hist.size() - 1] : 0.0;
        const double u2 = hist.size() >= 2 ? hist[hist.size() - 2] : 0.0;
        const int memory = g.find_node(id)->memory;
        const double expected =
            memory == 1 ? (u - u1) / dt : (u - 2.0 * u1 + u2) / (dt * dt);
        CHECK(net.last_preactivation(id) == expected);
        u_history[id].push_back(u);
      }
    }
  }
}

TEST_CASE("constant input drives memory nodes to exactly zero") {
  // Direct single-layer law: M=1 zero from step 2, M=2 zero from step 3.
  Phenotype m1 = Phenotype::compile(
      single_edge_genome(Activation::SaturatedLinear, 1, 0.8), 0.1);
  const std::vector<double> c{0.37};
  m1.step(c);
  for (int s = 2; s <= 6; ++s) {
    m1.step(c);
    CHECK(m1.last_preactivation(2) == 0.0);
  }
  Phenotype m2 = Phenotype::compile(
      single_edge_genome(Activation::SaturatedLinear, 2, 0.8), 0.1);
  m2.step(c);
  m2.step(c);
  for (int s = 3; s <= 7; ++s) {
    m2.step(c);
    CHECK(m2.last_preactivation(2) == 0.0);
  }

  // Deep networks settle once every upstream value stabilizes.
  InnovationTracker tracker;
  RngStream rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Genome g = test_util::random_genome(rng, tracker);
    Phenotype net = Phenotype::compile(g, 0.5);
    std::vector<double> inputs(net.n_inputs(), 0.4);
    const int settle = static_cast<int>(g.nodes.size()) + 3;
    for (int s = 0; s < settle; ++s) net.step(inputs);
    for (const auto& n : g.nodes) {
      if (n.memory == 0) continue;
      net.step(inputs);
      CHECK(net.last_preactivation(n.id) == 0.0);
    }
  }
}

TEST_CASE("step is deterministic for a replayed input sequence") {
  InnovationTracker tracker;
  RngStream rng(41);
  const Genome g = test_util::random_genome(rng, tracker);
  Phenotype a = Phenotype::compile(g, 0.2);
  Phenotype b = Phenotype::compile(g, 0.2);
  for (int s = 0; s < 10; ++s) {
    std::vector<double> inputs(a.n_inputs());
    for (auto& v : inputs) v = rng.uniform(-3.0, 3.0);
    CHECK(a.step(inputs) == b.step(inputs));
  }
}

TEST_CASE("activation ranges hold for all finite arguments") {
  RngStream rng(43);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-50.0, 50.0);
    const double sat = apply_activation(Activation::SaturatedLinear, x);
    CHECK(sat >= -1.0);
    CHECK(sat <= 1.0);
    for (Activation a : {Activation::ModifiedSigmoid, Activation::Sigmoid}) {
      const double y = apply_activation(a, x);
      CHECK(y >= 0.0);
      CHECK(y <= 1.0);
    }
  }
  CHECK(apply_activation(Activation::SaturatedLinear, -7.5) == -1.0);
  CHECK(apply_activation(Activation::SaturatedLinear, 0.25) == 0.25);
  CHECK(apply_activation(Activation::ModifiedSigmoid, 0.0) == 0.5);
}

TEST_CASE("step rejects malformed and non-finite inputs") {
  Phenotype net =
      Phenotype::compile(single_edge_genome(Activation::Sigmoid, 0, 1.0), 1.0);
  CHECK_THROWS_AS(net.step(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(net.step(std::vector<double>{
                      std::numeric_limits<double>::quiet_NaN()}),
                  std::invalid_argument);
}

}  // TEST_SUITE
