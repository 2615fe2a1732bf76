#include "agent/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agent {

double improvement(std::span<const double> fitness_history, double alpha_i) {
  if (fitness_history.size() < 2)
    throw std::invalid_argument("improvement: need at least two generations");
  const auto t = fitness_history.size() - 1;
  const double latest = fitness_history[t];
  double total = 0.0;
  for (std::size_t tau = 0; tau < t; ++tau) {
    const double base = alpha_i * std::max(latest - fitness_history[tau], 0.0);
    if (base > 0.0)
      total += std::pow(base, static_cast<double>(tau) / static_cast<double>(t));
  }
  return total;
}

double update_mutation_rate(double mu_prev, double i_best, double i_ave,
                            double gain, double mu_min, double mu_max) {
  if (i_best <= kImprovementEpsilon) return mu_prev;
  const double next = mu_prev * std::exp(-gain * (i_best - i_ave) / i_best);
  return std::clamp(next, mu_min, mu_max);
}

void AdaptationConfig::check() const {
  if (!(gain > 0.0))
    throw std::invalid_argument("adaptation: gain must be positive");
  if (!(alpha_i > 0.0))
    throw std::invalid_argument("adaptation: alpha_i must be positive");
  if (!(mu_min > 0.0) || mu_min > mu_max || mu_max > 1.0)
    throw std::invalid_argument(
        "adaptation: mutation-rate bounds must satisfy 0 < min <= max <= 1");
  if (mu_init < mu_min || mu_init > mu_max)
    throw std::invalid_argument("adaptation: mu_init outside bounds");
}

MutationRateController::MutationRateController(const AdaptationConfig& cfg)
    : cfg_(cfg), mu_(cfg.mu_init) {
  cfg_.check();
}

void MutationRateController::observe(double best_fitness,
                                     double average_fitness) {
  best_.push_back(best_fitness);
  average_.push_back(average_fitness);
}

double MutationRateController::update() {
  if (best_.size() < 2) return mu_;
  i_best_ = improvement(best_, cfg_.alpha_i);
  i_ave_ = improvement(average_, cfg_.alpha_i);
  if (cfg_.enabled)
    mu_ = update_mutation_rate(mu_, i_best_, i_ave_, cfg_.gain, cfg_.mu_min,
                               cfg_.mu_max);
  return mu_;
}

}  // namespace agent
