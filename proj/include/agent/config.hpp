#pragma once

#include <cstdint>
#include <string>

#include "agent/evolution.hpp"

namespace agent {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration, mirrored one-to-one by the flat sectioned
// key = value file format. Every tunable has a resolved value after parsing;
// rendering the struct back out reproduces an equivalent file (the run
// manifest is exactly that rendering).
struct ExperimentConfig {
  // [run]
  std::string environment;  // required
  int population = 200;
  int generations = 100;  // t_max
  int species = 8;
  std::uint64_t seed = 1;
  std::string output_dir = "runs/out";
  int threads = 0;  // 0 = hardware concurrency

  // [selection]
  int tournament_size = 0;  // 0 = auto: max(2, round(0.05 * population))
  double initial_ratio = 1.0;

  // [diversity]
  bool diversity_enabled = true;
  double beta_div = 1.5;
  double diversity_gain = 0.1;  // K_D
  double ratio_min = 0.02;
  double ratio_max = 1.0;

  // [adaptation]
  bool adaptation_enabled = true;
  double adaptation_gain = 0.1;  // K_I
  double alpha_i = 1.0;
  double mu_init = 0.5;
  double mu_min = 0.01;
  double mu_max = 0.9;

  // [mutation]
  double sigma_weight = 0.8;
  double p_weight = 0.8;
  double p_prop = 0.05;
  double add_node_scale = 0.25;

  // [fitness] — negative `scenarios` and NaN thresholds mean "use the
  // environment defaults"; resolve_defaults() replaces them.
  int scenarios = -1;
  double pass_threshold = 0.0;
  bool pass_threshold_set = false;
  double pass_threshold_late = 0.0;
  bool pass_threshold_late_set = false;
  int threshold_switch_generation = -1;  // -1 = no schedule

  void resolve_defaults();  // fills environment-dependent fitness defaults
  void check() const;

  EvolutionConfig evolution_config(int n_inputs, int n_outputs) const;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
std::string render_config(const ExperimentConfig& cfg);

}  // namespace agent
