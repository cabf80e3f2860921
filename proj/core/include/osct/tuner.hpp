#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/dqn.hpp"

namespace osct {

// Seeded random search over the eleven DQN hyperparameters.
struct SearchSpace {
  std::pair<double, double> learning_rate{1e-4, 1e-2};  // log-uniform
  std::vector<std::size_t> buffer_size{5'000, 10'000, 50'000, 100'000};
  std::pair<double, double> gamma{0.85, 0.99};
  std::pair<double, double> tau{0.005, 0.1};  // log-uniform
  std::pair<double, double> epsilon_start{0.8, 1.0};
  std::pair<double, double> epsilon_end{0.01, 0.1};
  std::pair<double, double> epsilon_fraction{0.1, 0.4};
  std::vector<std::size_t> batch_size{32, 64, 128};
  std::vector<int> train_frequency{4, 8, 16};
  std::vector<int> gradient_steps{1, 2, 3, 4, 5};
  std::vector<int> hidden_width{64, 128, 256};
};

void to_json(nlohmann::json& j, const SearchSpace& s);
void from_json(const nlohmann::json& j, SearchSpace& s);

// Draws one configuration; fields outside the space keep their `base` values.
DqnConfig sample_config(const SearchSpace& space, const DqnConfig& base, std::mt19937_64& rng);

struct TrialResult {
  std::size_t index = 0;
  DqnConfig config;
  std::uint64_t seed = 0;
  double mean_reward = 0.0;  // -inf when the trial diverged
  double mean_hardness = 0.0;
  bool diverged = false;
  std::string divergence_reason;
  bool soft_diverged = false;
  double max_abs_q = 0.0;
  double loss_variance = 0.0;
  double seconds = 0.0;
};

struct TunerReport {
  std::vector<TrialResult> trials;
  std::optional<std::size_t> best;  // index into trials; none if every trial diverged
};

struct TunerOptions {
  std::size_t trials = 12;
  std::uint64_t steps_per_trial = 50'000;
  std::size_t eval_episodes = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// Trains and evaluates one configuration; shared by the search and by reruns
// of a reported trial.
TrialResult run_trial(const DqnConfig& config, std::uint64_t seed, const ContextPool& pool, const EnvConfig& env_config,
                      std::uint64_t steps, std::size_t eval_episodes);

// The configurations random_search evaluates for this seed, in trial order.
std::vector<DqnConfig> draw_configs(const SearchSpace& space, const DqnConfig& base, std::size_t trials,
                                    std::uint64_t seed);

TunerReport random_search(const SearchSpace& space, const DqnConfig& base, const ContextPool& pool,
                          const EnvConfig& env_config, const TunerOptions& options);

nlohmann::json tuner_report_json(const TunerReport& r);

}  // namespace osct
