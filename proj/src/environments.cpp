#include "agent/environments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "agent/rng.hpp"

namespace agent {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_not_done(bool done, const char* env) {
  if (done)
    throw std::runtime_error(std::string(env) +
                             ": step called on finished episode");
}

double wrap_angle(double x) {
  while (x > kPi) x -= 2.0 * kPi;
  while (x < -kPi) x += 2.0 * kPi;
  return x;
}

void write_trace_row(std::ostream& trace, int step,
                     std::span<const double> obs,
                     std::span<const double> action, double reward, bool done) {
  char buf[64];
  trace << step;
  for (double v : obs) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    trace << ',' << buf;
  }
  for (double v : action) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    trace << ',' << buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", reward);
  trace << ',' << buf << ',' << (done ? 1 : 0) << '\n';
}

}  // namespace

std::vector<double> MountainCar::reset(std::uint64_t seed) {
  RngStream rng(seed);
  return reset_to(rng.uniform(-0.6, -0.4), 0.0);
}

std::vector<double> MountainCar::reset_to(double position, double velocity) {
  position_ = position;
  velocity_ = velocity;
  steps_ = 0;
  done_ = false;
  goal_ = false;
  return observation();
}

StepResult MountainCar::step(std::span<const double> action) {
  require_not_done(done_, name());
  if (action.size() != 1)
    throw std::invalid_argument("mountain_car: action must have 1 component");
  const double force = std::clamp(action[0], -1.0, 1.0);

  velocity_ += kForceScale * force - kGravityScale * std::cos(3.0 * position_);
  velocity_ = std::clamp(velocity_, -kMaxSpeed, kMaxSpeed);
  position_ += velocity_;
  position_ = std::clamp(position_, kMinPosition, kMaxPosition);
  if (position_ == kMinPosition && velocity_ < 0.0) velocity_ = 0.0;

  ++steps_;
  goal_ = position_ >= kGoalPosition;
  done_ = goal_ || steps_ >= max_steps_;

  StepResult result;
  result.observation = observation();
  result.reward = (goal_ ? 100.0 : 0.0) - 0.1 * force * force;
  result.done = done_;
  return result;
}

double Acrobot::max_vel_1() { return 4.0 * kPi; }
double Acrobot::max_vel_2() { return 9.0 * kPi; }

std::vector<double> Acrobot::observation() const {
  return {std::cos(theta1_), std::sin(theta1_), std::cos(theta2_),
          std::sin(theta2_), omega1_, omega2_};
}

std::vector<double> Acrobot::reset(std::uint64_t seed) {
  RngStream rng(seed);
  const double t1 = rng.uniform(-0.1, 0.1);
  const double t2 = rng.uniform(-0.1, 0.1);
  const double w1 = rng.uniform(-0.1, 0.1);
  const double w2 = rng.uniform(-0.1, 0.1);
  return reset_to(t1, t2, w1, w2);
}

std::vector<double> Acrobot::reset_to(double theta1, double theta2,
                                      double omega1, double omega2) {
  theta1_ = theta1;
  theta2_ = theta2;
  omega1_ = omega1;
  omega2_ = omega2;
  steps_ = 0;
  done_ = false;
  goal_ = false;
  return observation();
}

namespace {

// Equations of motion for the two-link pendulum ("book" formulation), with
// the joint torque applied at the second joint.
std::array<double, 4> acrobot_derivatives(const std::array<double, 4>& s,
                                          double torque) {
  constexpr double m1 = Acrobot::kLinkMass1;
  constexpr double m2 = Acrobot::kLinkMass2;
  constexpr double l1 = Acrobot::kLinkLength1;
  constexpr double lc1 = Acrobot::kLinkCom1;
  constexpr double lc2 = Acrobot::kLinkCom2;
  constexpr double i1 = Acrobot::kLinkMoi;
  constexpr double i2 = Acrobot::kLinkMoi;
  constexpr double g = Acrobot::kGravity;

  const double theta1 = s[0];
  const double theta2 = s[1];
  const double dtheta1 = s[2];
  const double dtheta2 = s[3];

  const double d1 =
      m1 * lc1 * lc1 +
      m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - kPi / 2.0);
  const double phi1 =
      -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - kPi / 2.0) + phi2;
  const double ddtheta2 =
      (torque + d2 / d1 * phi1 -
       m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

std::array<double, 4> rk4_step(const std::array<double, 4>& y, double torque,
                               double dt) {
  const auto k1 = acrobot_derivatives(y, torque);
  std::array<double, 4> y2;
  for (int i = 0; i < 4; ++i) y2[i] = y[i] + dt / 2.0 * k1[i];
  const auto k2 = acrobot_derivatives(y2, torque);
  std::array<double, 4> y3;
  for (int i = 0; i < 4; ++i) y3[i] = y[i] + dt / 2.0 * k2[i];
  const auto k3 = acrobot_derivatives(y3, torque);
  std::array<double, 4> y4;
  for (int i = 0; i < 4; ++i) y4[i] = y[i] + dt * k3[i];
  const auto k4 = acrobot_derivatives(y4, torque);
  std::array<double, 4> out;
  for (int i = 0; i < 4; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

StepResult Acrobot::step(std::span<const double> action) {
  require_not_done(done_, name());
  if (action.size() != 1)
    throw std::invalid_argument("acrobot: action must have 1 component");
  const int index = static_cast<int>(std::lround(action[0]));
  if (index < 0 || index > 2 ||
      std::abs(action[0] - static_cast<double>(index)) > 1e-9)
    throw std::invalid_argument("acrobot: action must be 0, 1 or 2");
  const double torque = static_cast<double>(index - 1);

  const auto next = rk4_step({theta1_, theta2_, omega1_, omega2_}, torque, kDt);
  theta1_ = wrap_angle(next[0]);
  theta2_ = wrap_angle(next[1]);
  omega1_ = std::clamp(next[2], -max_vel_1(), max_vel_1());
  omega2_ = std::clamp(next[3], -max_vel_2(), max_vel_2());

  ++steps_;
  goal_ = -std::cos(theta1_) - std::cos(theta2_ + theta1_) > 1.0;
  done_ = goal_ || steps_ >= max_steps_;

  StepResult result;
  result.observation = observation();
  result.reward = -1.0;
  result.done = done_;
  return result;
}

std::unique_ptr<Environment> make_environment(const std::string& name,
                                              int max_steps_override) {
  if (name == "mountain_car")
    return std::make_unique<MountainCar>(max_steps_override > 0
                                             ? max_steps_override
                                             : MountainCar::kDefaultMaxSteps);
  if (name == "acrobot")
    return std::make_unique<Acrobot>(max_steps_override > 0
                                         ? max_steps_override
                                         : Acrobot::kDefaultMaxSteps);
  throw std::invalid_argument("unknown environment \"" + name + "\"");
}

bool is_known_environment(const std::string& name) {
  return name == "mountain_car" || name == "acrobot";
}

std::vector<double> adapt_action(std::span<const double> outputs,
                                 std::span<const Activation> output_kinds,
                                 const ActionSpace& space) {
  if (static_cast<int>(outputs.size()) != space.dim)
    throw std::invalid_argument(
        "action adapter: network has " + std::to_string(outputs.size()) +
        " outputs but the environment expects " + std::to_string(space.dim));
  if (outputs.size() != output_kinds.size())
    throw std::invalid_argument("action adapter: activation list mismatch");

  if (space.discrete) {
    int best = 0;
    for (int i = 1; i < space.dim; ++i)
      if (outputs[i] > outputs[best]) best = i;
    return {static_cast<double>(best)};
  }

  std::vector<double> action(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    // Normalize the activation's native range to [0, 1], then scale.
    const double unit = output_kinds[i] == Activation::SaturatedLinear
                            ? (outputs[i] + 1.0) / 2.0
                            : outputs[i];
    action[i] = space.low + unit * (space.high - space.low);
  }
  return action;
}

EpisodeResult run_episode(Environment& env, Phenotype& net, std::uint64_t seed,
                          std::ostream* trace) {
  if (net.n_inputs() != env.n_obs())
    throw std::invalid_argument(
        "run_episode: network has " + std::to_string(net.n_inputs()) +
        " inputs but the environment emits " + std::to_string(env.n_obs()) +
        " observations");
  const ActionSpace space = env.action_space();
  const auto kinds = net.output_activations();

  std::vector<double> obs = env.reset(seed);
  net.reset();

  EpisodeResult result;
  while (true) {
    const auto outputs = net.step(obs);
    const auto action = adapt_action(outputs, kinds, space);
    const StepResult sr = env.step(action);
    if (trace)
      write_trace_row(*trace, env.steps_taken(), obs, action, sr.reward,
                      sr.done);
    result.reward += sr.reward;
    ++result.steps;
    if (sr.done) break;
    obs = sr.observation;
  }
  result.solved = env.goal_reached();
  return result;
}

void ScenarioSet::check() const {
  if (seeds.empty())
    throw std::invalid_argument("scenario set needs at least one scenario");
  if (seeds.size() != thresholds.size())
    throw std::invalid_argument(
        "scenario set: seeds and thresholds must have equal length");
}

std::vector<std::uint64_t> make_scenario_seeds(std::uint64_t base_seed,
                                               int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(count);
  for (int i = 0; i < count; ++i)
    seeds.push_back(derive_seed(base_seed, 0x5ce7a210u, i));
  return seeds;
}

FitnessOutcome progressive_fitness(
    const std::function<EpisodeResult(std::uint64_t)>& episode,
    const ScenarioSet& scenarios) {
  scenarios.check();
  FitnessOutcome outcome;
  double sum = 0.0;
  for (std::size_t i = 0; i < scenarios.seeds.size(); ++i) {
    EpisodeResult res;
    try {
      res = episode(scenarios.seeds[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("scenario seed " +
                               std::to_string(scenarios.seeds[i]) + ": " +
                               e.what());
    }
    outcome.scenario_rewards.push_back(res.reward);
    outcome.total_steps += res.steps;
    sum += res.reward;
    if (res.reward < scenarios.thresholds[i]) break;
    ++outcome.scenarios_passed;
  }
  outcome.f_net = sum / static_cast<double>(scenarios.seeds.size());
  return outcome;
}

}  // namespace agent
