#include "agent/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "agent/environments.hpp"

namespace agent {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Raw parsed file: section -> key -> (value, line). Keys are consumed as the
// typed config is filled; leftovers are unknown-key errors.
struct RawConfig {
  std::map<std::string, std::map<std::string, std::pair<std::string, int>>>
      sections;

  bool take(const std::string& section, const std::string& key,
            std::string& out) {
    auto sit = sections.find(section);
    if (sit == sections.end()) return false;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return false;
    out = kit->second.first;
    sit->second.erase(kit);
    return true;
  }
};

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": empty section name");
      raw.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": empty key");
    if (!raw.sections[section].emplace(key, std::pair{value, line_no}).second)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key \"" + key + "\"");
  }
  return raw;
}

int to_int(const std::string& section, const std::string& key,
           const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key +
                      ": expected integer, got \"" + value + "\"");
  }
}

std::uint64_t to_u64(const std::string& section, const std::string& key,
                     const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key +
                      ": expected unsigned integer, got \"" + value + "\"");
  }
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size() || !std::isfinite(v))
      throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + section + "." + key +
                      ": expected number, got \"" + value + "\"");
  }
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config key " + section + "." + key +
                    ": expected true/false, got \"" + value + "\"");
}

}  // namespace

void ExperimentConfig::resolve_defaults() {
  if (environment.empty())
    throw ConfigError("config: missing required key run.environment");
  if (!is_known_environment(environment))
    throw ConfigError("config key run.environment: unknown environment \"" +
                      environment + "\"");
  if (scenarios < 0) scenarios = environment == "acrobot" ? 5 : 3;
  if (!pass_threshold_set) {
    pass_threshold = environment == "acrobot" ? -500.0 : 0.0;
    pass_threshold_set = true;
  }
  if (!pass_threshold_late_set) {
    pass_threshold_late = pass_threshold;
    pass_threshold_late_set = true;
  }
  if (tournament_size == 0)
    tournament_size = default_tournament_size(population);
}

void ExperimentConfig::check() const {
  if (environment.empty())
    throw ConfigError("config: missing required key run.environment");
  if (!is_known_environment(environment))
    throw ConfigError("config key run.environment: unknown environment \"" +
                      environment + "\"");
  if (population < 4) throw ConfigError("config key run.population: must be >= 4");
  if (generations < 0)
    throw ConfigError("config key run.generations: must be >= 0");
  if (species < 1 || species > population)
    throw ConfigError("config key run.species: must be in [1, population]");
  if (threads < 0) throw ConfigError("config key run.threads: must be >= 0");
  if (scenarios < 1)
    throw ConfigError("config key fitness.scenarios: must be >= 1");
  try {
    EvolutionConfig ec = evolution_config(1, 1);
    ec.check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

EvolutionConfig ExperimentConfig::evolution_config(int n_inputs,
                                                   int n_outputs) const {
  EvolutionConfig ec;
  ec.n_inputs = n_inputs;
  ec.n_outputs = n_outputs;
  ec.population_size = population;
  ec.t_max = generations;
  ec.species_count = species;
  ec.tournament_size = tournament_size;
  ec.threads = threads;
  ec.diversity.enabled = diversity_enabled;
  ec.diversity.initial_ratio = initial_ratio;
  ec.diversity.beta_div = beta_div;
  ec.diversity.gain = diversity_gain;
  ec.diversity.ratio_min = ratio_min;
  ec.diversity.ratio_max = ratio_max;
  ec.adaptation.enabled = adaptation_enabled;
  ec.adaptation.gain = adaptation_gain;
  ec.adaptation.alpha_i = alpha_i;
  ec.adaptation.mu_init = mu_init;
  ec.adaptation.mu_min = mu_min;
  ec.adaptation.mu_max = mu_max;
  ec.rates.mu_structural = mu_init;
  ec.rates.sigma_weight = sigma_weight;
  ec.rates.p_weight = p_weight;
  ec.rates.p_prop = p_prop;
  ec.rates.add_node_scale = add_node_scale;
  return ec;
}

ExperimentConfig parse_config_text(const std::string& text) {
  RawConfig raw = parse_raw(text);
  ExperimentConfig cfg;
  std::string v;

  if (raw.take("run", "environment", v)) cfg.environment = v;
  if (raw.take("run", "population", v))
    cfg.population = to_int("run", "population", v);
  if (raw.take("run", "generations", v))
    cfg.generations = to_int("run", "generations", v);
  if (raw.take("run", "species", v)) cfg.species = to_int("run", "species", v);
  if (raw.take("run", "seed", v)) cfg.seed = to_u64("run", "seed", v);
  if (raw.take("run", "output_dir", v)) cfg.output_dir = v;
  if (raw.take("run", "threads", v)) cfg.threads = to_int("run", "threads", v);

  if (raw.take("selection", "tournament_size", v))
    cfg.tournament_size = to_int("selection", "tournament_size", v);
  if (raw.take("selection", "initial_ratio", v))
    cfg.initial_ratio = to_double("selection", "initial_ratio", v);

  if (raw.take("diversity", "enabled", v))
    cfg.diversity_enabled = to_bool("diversity", "enabled", v);
  if (raw.take("diversity", "beta", v))
    cfg.beta_div = to_double("diversity", "beta", v);
  if (raw.take("diversity", "gain", v))
    cfg.diversity_gain = to_double("diversity", "gain", v);
  if (raw.take("diversity", "ratio_min", v))
    cfg.ratio_min = to_double("diversity", "ratio_min", v);
  if (raw.take("diversity", "ratio_max", v))
    cfg.ratio_max = to_double("diversity", "ratio_max", v);

  if (raw.take("adaptation", "enabled", v))
    cfg.adaptation_enabled = to_bool("adaptation", "enabled", v);
  if (raw.take("adaptation", "gain", v))
    cfg.adaptation_gain = to_double("adaptation", "gain", v);
  if (raw.take("adaptation", "alpha", v))
    cfg.alpha_i = to_double("adaptation", "alpha", v);
  if (raw.take("adaptation", "mu_init", v))
    cfg.mu_init = to_double("adaptation", "mu_init", v);
  if (raw.take("adaptation", "mu_min", v))
    cfg.mu_min = to_double("adaptation", "mu_min", v);
  if (raw.take("adaptation", "mu_max", v))
    cfg.mu_max = to_double("adaptation", "mu_max", v);

  if (raw.take("mutation", "sigma_weight", v))
    cfg.sigma_weight = to_double("mutation", "sigma_weight", v);
  if (raw.take("mutation", "p_weight", v))
    cfg.p_weight = to_double("mutation", "p_weight", v);
  if (raw.take("mutation", "p_prop", v))
    cfg.p_prop = to_double("mutation", "p_prop", v);
  if (raw.take("mutation", "add_node_scale", v))
    cfg.add_node_scale = to_double("mutation", "add_node_scale", v);

  if (raw.take("fitness", "scenarios", v))
    cfg.scenarios = to_int("fitness", "scenarios", v);
  if (raw.take("fitness", "threshold", v)) {
    cfg.pass_threshold = to_double("fitness", "threshold", v);
    cfg.pass_threshold_set = true;
  }
  if (raw.take("fitness", "threshold_late", v)) {
    cfg.pass_threshold_late = to_double("fitness", "threshold_late", v);
    cfg.pass_threshold_late_set = true;
  }
  if (raw.take("fitness", "threshold_switch_generation", v))
    cfg.threshold_switch_generation =
        to_int("fitness", "threshold_switch_generation", v);

  static const char* kKnownSections[] = {"run",        "selection", "diversity",
                                         "adaptation", "mutation",  "fitness"};
  for (const auto& [section, keys] : raw.sections) {
    bool known = false;
    for (const char* s : kKnownSections)
      if (section == s) known = true;
    if (!known)
      throw ConfigError("config: unknown section \"" + section + "\"");
    if (!keys.empty()) {
      const auto& [key, where] = *keys.begin();
      throw ConfigError("config line " + std::to_string(where.second) +
                        ": unknown key \"" + section + "." + key + "\"");
    }
  }

  cfg.resolve_defaults();
  cfg.check();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "environment = " << cfg.environment << '\n';
  out << "population = " << cfg.population << '\n';
  out << "generations = " << cfg.generations << '\n';
  out << "species = " << cfg.species << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "output_dir = " << cfg.output_dir << '\n';
  out << "threads = " << cfg.threads << '\n';
  out << "\n[selection]\n";
  out << "tournament_size = " << cfg.tournament_size << '\n';
  out << "initial_ratio = " << format_double(cfg.initial_ratio) << '\n';
  out << "\n[diversity]\n";
  out << "enabled = " << (cfg.diversity_enabled ? "true" : "false") << '\n';
  out << "beta = " << format_double(cfg.beta_div) << '\n';
  out << "gain = " << format_double(cfg.diversity_gain) << '\n';
  out << "ratio_min = " << format_double(cfg.ratio_min) << '\n';
  out << "ratio_max = " << format_double(cfg.ratio_max) << '\n';
  out << "\n[adaptation]\n";
  out << "enabled = " << (cfg.adaptation_enabled ? "true" : "false") << '\n';
  out << "gain = " << format_double(cfg.adaptation_gain) << '\n';
  out << "alpha = " << format_double(cfg.alpha_i) << '\n';
  out << "mu_init = " << format_double(cfg.mu_init) << '\n';
  out << "mu_min = " << format_double(cfg.mu_min) << '\n';
  out << "mu_max = " << format_double(cfg.mu_max) << '\n';
  out << "\n[mutation]\n";
  out << "sigma_weight = " << format_double(cfg.sigma_weight) << '\n';
  out << "p_weight = " << format_double(cfg.p_weight) << '\n';
  out << "p_prop = " << format_double(cfg.p_prop) << '\n';
  out << "add_node_scale = " << format_double(cfg.add_node_scale) << '\n';
  out << "\n[fitness]\n";
  out << "scenarios = " << cfg.scenarios << '\n';
  out << "threshold = " << format_double(cfg.pass_threshold) << '\n';
  out << "threshold_late = " << format_double(cfg.pass_threshold_late) << '\n';
  out << "threshold_switch_generation = " << cfg.threshold_switch_generation
      << '\n';
  return out.str();
}

}  // namespace agent
