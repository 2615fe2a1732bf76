#include <cmath>
#include <vector>

#include "agent/adaptation.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agent;

TEST_SUITE("adaptation") {

TEST_CASE("constant fitness history yields zero improvement") {
  const std::vector<double> flat{3.5, 3.5, 3.5, 3.5};
  CHECK(improvement(flat, 1.0) == 0.0);
}

TEST_CASE("improvement matches the hand-evaluated discretization") {
  // t = 2, f = [0, 0, 1], alpha = 1: terms 1^0 = 1 and 1^(1/2) = 1
  const std::vector<double> f{0.0, 0.0, 1.0};
  CHECK(improvement(f, 1.0) == 2.0);
}

TEST_CASE("worsening fitness clamps every term to zero") {
  const std::vector<double> f{2.0, 1.0, 0.0};
  CHECK(improvement(f, 1.0) == 0.0);
}

TEST_CASE("improvement requires at least two generations") {
  const std::vector<double> f{1.0};
  CHECK_THROWS_AS(improvement(f, 1.0), std::invalid_argument);
}

TEST_CASE("improvement is monotone in the latest fitness") {
  RngStream rng(401);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> f;
    const int t = 2 + rng.uniform_int(8);
    for (int i = 0; i < t; ++i) f.push_back(rng.uniform(-5.0, 5.0));
    f.push_back(rng.uniform(-5.0, 5.0));
    const double base = improvement(f, 1.0);
    f.back() += rng.uniform(0.0, 3.0);
    CHECK(improvement(f, 1.0) >= base);
  }
}

TEST_CASE("improvement is exactly translation invariant") {
  RngStream rng(409);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> f;
    const int t = 2 + rng.uniform_int(8);
    // dyadic values so that adding the offset is exact in floating point
    for (int i = 0; i <= t; ++i) f.push_back(rng.uniform_int(4096) / 1024.0);
    std::vector<double> shifted = f;
    for (auto& v : shifted) v += 16.0;
    CHECK(improvement(f, 0.7) == improvement(shifted, 0.7));
  }
}

TEST_CASE("mutation-rate controller fixed point and directions") {
  CHECK(update_mutation_rate(0.5, 2.0, 2.0, 0.1, 0.01, 0.9) == 0.5);
  CHECK(update_mutation_rate(0.5, 1.0, 0.0, 0.1, 0.01, 0.9) ==
        doctest::Approx(0.5 * std::exp(-0.1)).epsilon(1e-12));
  CHECK(update_mutation_rate(0.5, 1.0, 2.0, 0.1, 0.01, 0.9) ==
        doctest::Approx(0.5 * std::exp(0.1)).epsilon(1e-12));
}

TEST_CASE("mutation rate stays inside its bounds and guards division") {
  // i_best ~ 0 leaves the rate untouched
  CHECK(update_mutation_rate(0.4, 0.0, 1.0, 0.1, 0.01, 0.9) == 0.4);
  CHECK(update_mutation_rate(0.4, 1e-12, 1.0, 0.1, 0.01, 0.9) == 0.4);

  RngStream rng(419);
  double mu = 0.5;
  for (int i = 0; i < 1000; ++i) {
    const double best = rng.uniform(0.0, 3.0);
    const double ave = rng.uniform(0.0, 3.0);
    mu = update_mutation_rate(mu, best, ave, 0.5, 0.01, 0.9);
    CHECK(mu >= 0.01);
    CHECK(mu <= 0.9);
  }
}

TEST_CASE("sign law holds away from the clamps") {
  RngStream rng(421);
  for (int i = 0; i < 500; ++i) {
    const double mu = rng.uniform(0.1, 0.8);
    const double best = rng.uniform(0.1, 2.0);
    const double ave = rng.uniform(0.0, 2.0);
    const double next = update_mutation_rate(mu, best, ave, 0.01, 0.01, 0.9);
    if (best > ave) CHECK(next < mu);
    if (best < ave) CHECK(next > mu);
    if (best == ave) CHECK(next == mu);
  }
}

TEST_CASE("controller integrates observations per generation") {
  AdaptationConfig cfg;
  MutationRateController ctl(cfg);
  CHECK(ctl.mu() == 0.5);
  ctl.observe(1.0, 0.5);
  CHECK(ctl.update() == 0.5);  // single observation: no history yet
  // with two entries both metrics collapse to base^0 = 1: a fixed point
  ctl.observe(2.0, 0.6);
  CHECK(ctl.update() == 0.5);
  CHECK(ctl.improvement_best() == ctl.improvement_average());
  // a third entry separates the tau/t weights
  ctl.observe(4.0, 0.65);
  const double mu = ctl.update();
  CHECK(mu < 0.5);  // best improved more than the average -> rate drops
  CHECK(ctl.improvement_best() > ctl.improvement_average());

  AdaptationConfig off = cfg;
  off.enabled = false;
  MutationRateController fixed(off);
  fixed.observe(1.0, 0.5);
  fixed.observe(2.0, 0.6);
  fixed.observe(4.0, 0.65);
  CHECK(fixed.update() == 0.5);
  CHECK(fixed.improvement_best() > 0.0);  // metrics still reported
}

}  // TEST_SUITE
