#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "agent/network.hpp"

namespace agent {

struct ActionSpace {
  bool discrete = false;
  int dim = 1;  // continuous dimensions, or number of discrete choices
  double low = -1.0;
  double high = 1.0;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool done = false;
};

// Uniform control-task contract. Environments are cheap single-threaded
// objects; use one instance per concurrent evaluation.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual const char* name() const = 0;
  virtual int n_obs() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual int max_steps() const = 0;
  virtual double solve_threshold() const = 0;
  // Control period fed to the phenotype's temporal-difference memory.
  virtual double time_step() const = 0;

  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;

  virtual bool goal_reached() const = 0;
  virtual int steps_taken() const = 0;
};

// Continuous mountain-car task: drive an underpowered car up the right hill.
// Dynamics and constants follow the public MountainCarContinuous-v0
// definition (see the constants table in the README).
class MountainCar final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.45;
  static constexpr double kForceScale = 0.0015;
  static constexpr double kGravityScale = 0.0025;
  static constexpr int kDefaultMaxSteps = 999;

  explicit MountainCar(int max_steps = kDefaultMaxSteps)
      : max_steps_(max_steps) {}

  const char* name() const override { return "mountain_car"; }
  int n_obs() const override { return 2; }
  ActionSpace action_space() const override { return {false, 1, -1.0, 1.0}; }
  int max_steps() const override { return max_steps_; }
  double solve_threshold() const override { return 90.0; }
  double time_step() const override { return 1.0; }

  std::vector<double> reset(std::uint64_t seed) override;
  std::vector<double> reset_to(double position, double velocity);
  StepResult step(std::span<const double> action) override;

  bool goal_reached() const override { return goal_; }
  int steps_taken() const override { return steps_; }

 private:
  std::vector<double> observation() const { return {position_, velocity_}; }

  int max_steps_;
  double position_ = 0.0;
  double velocity_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
  bool goal_ = false;
};

// Two-link underactuated pendulum: swing the tip above one link length.
// Dynamics and constants follow the public Acrobot-v1 definition (RK4 with a
// 0.2 s step, "book" equations of motion).
class Acrobot final : public Environment {
 public:
  static constexpr double kDt = 0.2;
  static constexpr double kGravity = 9.8;
  static constexpr double kLinkLength1 = 1.0;
  static constexpr double kLinkMass1 = 1.0;
  static constexpr double kLinkMass2 = 1.0;
  static constexpr double kLinkCom1 = 0.5;
  static constexpr double kLinkCom2 = 0.5;
  static constexpr double kLinkMoi = 1.0;
  static constexpr int kDefaultMaxSteps = 500;
  static double max_vel_1();  // 4*pi
  static double max_vel_2();  // 9*pi

  explicit Acrobot(int max_steps = kDefaultMaxSteps) : max_steps_(max_steps) {}

  const char* name() const override { return "acrobot"; }
  int n_obs() const override { return 6; }
  ActionSpace action_space() const override { return {true, 3, 0.0, 2.0}; }
  int max_steps() const override { return max_steps_; }
  double solve_threshold() const override { return -70.0; }
  double time_step() const override { return kDt; }

  std::vector<double> reset(std::uint64_t seed) override;
  std::vector<double> reset_to(double theta1, double theta2, double omega1,
                               double omega2);
  StepResult step(std::span<const double> action) override;

  bool goal_reached() const override { return goal_; }
  int steps_taken() const override { return steps_; }

  // Raw joint state, mostly for trace tooling.
  std::array<double, 4> state() const {
    return {theta1_, theta2_, omega1_, omega2_};
  }

 private:
  std::vector<double> observation() const;

  int max_steps_;
  double theta1_ = 0.0;
  double theta2_ = 0.0;
  double omega1_ = 0.0;
  double omega2_ = 0.0;
  int steps_ = 0;
  bool done_ = true;
  bool goal_ = false;
};

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              int max_steps_override = 0);
bool is_known_environment(const std::string& name);

// Maps raw network outputs to an environment action. Continuous spaces:
// sigmoid-family outputs are rescaled from (0,1), saturated-linear outputs
// from [-1,1]. Discrete spaces: argmax with lowest-index tie-break.
std::vector<double> adapt_action(std::span<const double> outputs,
                                 std::span<const Activation> output_kinds,
                                 const ActionSpace& space);

struct EpisodeResult {
  double reward = 0.0;
  long steps = 0;
  bool solved = false;
};

// Runs one episode from a seeded reset. When `trace` is set, writes one CSV
// row per step: step, observation..., action..., reward, done.
EpisodeResult run_episode(Environment& env, Phenotype& net, std::uint64_t seed,
                          std::ostream* trace = nullptr);

struct ScenarioSet {
  std::vector<std::uint64_t> seeds;
  std::vector<double> thresholds;  // accumulated-reward bar per scenario
  void check() const;
};

std::vector<std::uint64_t> make_scenario_seeds(std::uint64_t base_seed,
                                               int count);

struct FitnessOutcome {
  double f_net = 0.0;
  int scenarios_passed = 0;  // N_p
  std::vector<double> scenario_rewards;
  long total_steps = 0;
};

// Progressive-episode fitness: scenarios run in order and evaluation stops at
// the first one whose accumulated reward misses its threshold. The failing
// scenario's reward still enters the sum; the normalizer is always the full
// scenario count.
FitnessOutcome progressive_fitness(
    const std::function<EpisodeResult(std::uint64_t)>& episode,
    const ScenarioSet& scenarios);

}  // namespace agent
