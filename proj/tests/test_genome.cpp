#include <cmath>
#include <set>

#include "agent/genome.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agent;

namespace {

Genome minimal_genome() {
  Genome g;
  g.insert_node({0, NodeRole::Input, Activation::ModifiedSigmoid, 0});
  g.insert_node({1, NodeRole::Bias, Activation::ModifiedSigmoid, 0});
  g.insert_node({2, NodeRole::Output, Activation::Sigmoid, 0});
  g.insert_edge({0, 2, 0.5});
  return g;
}

bool report_mentions(const std::vector<std::string>& report,
                     const std::string& needle) {
  for (const auto& line : report)
    if (line.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_SUITE("genome") {

TEST_CASE("validate accepts the minimal topology") {
  CHECK(validate(minimal_genome()).empty());
}

TEST_CASE("validate reports a two-node cycle") {
  Genome g = minimal_genome();
  g.insert_node({3, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_edge({0, 3, 1.0});
  g.insert_edge({3, 2, 1.0});
  // introduce h -> h' -> h cycle
  g.insert_node({4, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_edge({3, 4, 1.0});
  g.insert_edge({4, 3, 1.0});
  CHECK(report_mentions(validate(g), "cycle"));
}

TEST_CASE("validate reports floating hidden nodes") {
  Genome g = minimal_genome();
  g.insert_node({3, NodeRole::Hidden, Activation::Sigmoid, 0});
  g.insert_edge({0, 3, 1.0});  // nothing leaves node 3
  CHECK(report_mentions(validate(g), "floating node"));
}

TEST_CASE("validate reports unknown endpoints and duplicates") {
  Genome g = minimal_genome();
  g.insert_edge({0, 99, 1.0});
  CHECK(report_mentions(validate(g), "unknown node"));

  Genome dup = minimal_genome();
  dup.edges.push_back({0, 2, 0.25});
  CHECK(report_mentions(validate(dup), "duplicate edge"));
}

TEST_CASE("validate rejects edges into inputs and bias") {
  Genome g = minimal_genome();
  g.insert_node({3, NodeRole::Hidden, Activation::Sigmoid, 1});
  g.insert_edge({0, 3, 1.0});
  g.insert_edge({3, 2, 1.0});
  g.insert_edge({3, 1, 1.0});  // hidden -> bias
  CHECK(report_mentions(validate(g), "targets bias node"));
}

TEST_CASE("validate reports unreachable outputs") {
  Genome g;
  g.insert_node({0, NodeRole::Input, Activation::ModifiedSigmoid, 0});
  g.insert_node({1, NodeRole::Output, Activation::Sigmoid, 0});
  CHECK(report_mentions(validate(g), "not reachable"));
}

TEST_CASE("init_population rejects bad dimensions") {
  InnovationTracker tracker;
  RngStream rng(1);
  CHECK_THROWS_AS(init_population({0, 1, 10}, tracker, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(init_population({1, 0, 10}, tracker, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(init_population({1, 1, 3}, tracker, rng),
                  std::invalid_argument);
}

TEST_CASE("init_population seeds valid genomes with the right interface") {
  InnovationTracker tracker;
  RngStream rng(7);
  InitConfig cfg{3, 2, 50};
  const auto population = init_population(cfg, tracker, rng);
  REQUIRE(population.size() == 50);
  for (const auto& g : population) {
    CHECK(validate(g).empty());
    CHECK(g.count_role(NodeRole::Input) == 3);
    CHECK(g.count_role(NodeRole::Bias) == 1);
    CHECK(g.count_role(NodeRole::Output) == 2);
    // full input/bias -> output connectivity
    for (int s = 0; s <= 3; ++s)
      for (int o = 4; o <= 5; ++o) CHECK(g.has_edge(s, o));
    for (const auto& e : g.edges) {
      CHECK(e.weight >= -1.0);
      CHECK(e.weight <= 1.0);
    }
  }
}

TEST_CASE("hidden seeding matches the sqrt(nI x nO) expectation") {
  InnovationTracker tracker;
  RngStream rng(11);
  InitConfig cfg{2, 1, 10000};
  const auto population = init_population(cfg, tracker, rng);
  double total = 0.0;
  for (const auto& g : population) total += g.count_role(NodeRole::Hidden);
  const double mean = total / population.size();
  CHECK(mean == doctest::Approx(std::sqrt(2.0)).epsilon(0.0354));  // +-0.05
}

TEST_CASE("hidden seeding with unit dimensions has mean 1") {
  InnovationTracker tracker;
  RngStream rng(13);
  InitConfig cfg{1, 1, 10000};
  const auto population = init_population(cfg, tracker, rng);
  double total = 0.0;
  for (const auto& g : population) total += g.count_role(NodeRole::Hidden);
  CHECK(total / population.size() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("hidden counts pass a Poisson goodness-of-fit test") {
  InnovationTracker tracker;
  RngStream rng(17);
  InitConfig cfg{2, 2, 10000};  // mean 2
  const auto population = init_population(cfg, tracker, rng);

  const double lambda = 2.0;
  const int buckets = 7;  // 0..5 and >=6
  std::vector<long> observed(buckets, 0);
  for (const auto& g : population) {
    const int h = g.count_role(NodeRole::Hidden);
    ++observed[std::min(h, buckets - 1)];
  }
  std::vector<double> expected(buckets, 0.0);
  double pmf = std::exp(-lambda);  // P(0)
  double cum = 0.0;
  for (int k = 0; k < buckets - 1; ++k) {
    expected[k] = 10000.0 * pmf;
    cum += pmf;
    pmf *= lambda / (k + 1);
  }
  expected[buckets - 1] = 10000.0 * (1.0 - cum);

  const double stat = test_util::chi_square(observed, expected);
  // chi-square critical value, 6 degrees of freedom, significance 0.01
  CHECK(stat < 16.812);
}

TEST_CASE("serialization round-trips the minimal genome") {
  const Genome g = minimal_genome();
  const Genome back = deserialize(serialize(g));
  CHECK(test_util::same_structure(g, back));
}

TEST_CASE("serialize refuses invalid genomes") {
  Genome g = minimal_genome();
  g.insert_edge({0, 99, 1.0});
  CHECK_THROWS_WITH_AS(serialize(g), doctest::Contains("unknown node"),
                       std::invalid_argument);
}

TEST_CASE("serialization round-trips all categorical values") {
  Genome g = minimal_genome();
  int id = 3;
  for (int a = 0; a < kActivationKinds; ++a) {
    for (int m = 0; m < kMemoryKinds; ++m) {
      g.insert_node({id, NodeRole::Hidden, static_cast<Activation>(a), m});
      g.insert_edge({0, id, 0.125 * id});
      g.insert_edge({id, 2, -0.25 * id});
      ++id;
    }
  }
  REQUIRE(validate(g).empty());
  const Genome back = deserialize(serialize(g));
  CHECK(test_util::same_structure(g, back));
}

TEST_CASE("deserialize reports unknown nodes with the offending line") {
  const std::string text =
      "AGENT-GENOME v1\n"
      "node 0 input none 0\n"
      "node 1 bias none 0\n"
      "node 2 output sigmoid 0\n"
      "edge 0 99 0.5\n";
  CHECK_THROWS_WITH_AS(deserialize(text),
                       doctest::Contains("unknown node 99"), ParseError);
}

TEST_CASE("deserialize rejects unknown record kinds and bad headers") {
  CHECK_THROWS_WITH_AS(deserialize("AGENT-GENOME v1\nblob 1 2 3\n"),
                       doctest::Contains("unknown record kind"), ParseError);
  CHECK_THROWS_AS(deserialize("GENOME v2\n"), ParseError);
  CHECK_THROWS_AS(deserialize(""), ParseError);
  // node records may not follow edge records
  CHECK_THROWS_WITH_AS(
      deserialize("AGENT-GENOME v1\n"
                  "node 0 input none 0\n"
                  "node 1 output sigmoid 0\n"
                  "edge 0 1 0.5\n"
                  "node 2 hidden sigmoid 0\n"),
      doctest::Contains("after edge"), ParseError);
}

TEST_CASE("deserialize rejects structurally invalid genomes") {
  // hidden node with no outgoing edge
  const std::string text =
      "AGENT-GENOME v1\n"
      "node 0 input none 0\n"
      "node 1 output sigmoid 0\n"
      "node 2 hidden sigmoid 1\n"
      "edge 0 1 0.5\n"
      "edge 0 2 0.5\n";
  CHECK_THROWS_WITH_AS(deserialize(text), doctest::Contains("floating node"),
                       ParseError);
}

TEST_CASE("serialization is the identity on random genomes") {
  InnovationTracker tracker;
  RngStream rng(23);
  for (int i = 0; i < 1000; ++i) {
    Genome g = test_util::random_genome(rng, tracker);
    // exercise odd weights too
    if (!g.edges.empty()) g.edges.front().weight = rng.normal(0.0, 3.0);
    REQUIRE(validate(g).empty());
    const Genome back = deserialize(serialize(g));
    CHECK(test_util::same_structure(g, back));
  }
}

TEST_CASE("innovation ids are shared per split within a generation") {
  InnovationTracker tracker(100);
  CHECK(tracker.node_id_for_split(1, 2) == 100);
  CHECK(tracker.node_id_for_split(1, 2) == 100);
  CHECK(tracker.node_id_for_split(2, 3) == 101);
  tracker.begin_generation();
  CHECK(tracker.node_id_for_split(1, 2) == 102);
}

}  // TEST_SUITE
