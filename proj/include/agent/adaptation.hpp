#pragma once

#include <span>
#include <vector>

namespace agent {

// Guard below which the best-improvement signal counts as zero and the
// mutation rate is left unchanged.
inline constexpr double kImprovementEpsilon = 1e-9;

// History-weighted improvement of the latest fitness over every earlier
// generation:
//   I_t = sum_{tau=0}^{t-1} base(tau)^(tau/t),
//   base(tau) = alpha_i * max(f_t - f_tau, 0)
// with base == 0 contributing 0 (including tau = 0), so a history without
// improvement yields exactly 0. Requires at least two entries (t >= 1).
double improvement(std::span<const double> fitness_history, double alpha_i);

// Exponential mutation-rate update: the rate drops when the best genome
// improves faster than the average (search too noisy) and rises when the
// best lags (stagnation). Held unchanged when i_best is ~0.
double update_mutation_rate(double mu_prev, double i_best, double i_ave,
                            double gain, double mu_min, double mu_max);

struct AdaptationConfig {
  bool enabled = true;
  double gain = 0.1;  // K_I
  double alpha_i = 1.0;
  double mu_init = 0.5;
  double mu_min = 0.01;
  double mu_max = 0.9;
  void check() const;
};

// Tracks best/average fitness per generation and adapts the structural
// mutation rate once per generation.
class MutationRateController {
 public:
  explicit MutationRateController(const AdaptationConfig& cfg);

  void observe(double best_fitness, double average_fitness);
  // Recomputes the improvement metrics and, when enabled and enough history
  // exists, applies the rate update. Returns the current rate either way.
  double update();

  double mu() const { return mu_; }
  double improvement_best() const { return i_best_; }
  double improvement_average() const { return i_ave_; }
  const std::vector<double>& best_history() const { return best_; }
  const std::vector<double>& average_history() const { return average_; }

 private:
  AdaptationConfig cfg_;
  std::vector<double> best_;
  std::vector<double> average_;
  double mu_;
  double i_best_ = 0.0;
  double i_ave_ = 0.0;
};

}  // namespace agent
