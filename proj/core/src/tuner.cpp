#include "osct/tuner.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "osct/dataset.hpp"

namespace osct {

namespace {

double log_uniform(std::pair<double, double> range, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(std::log(range.first), std::log(range.second));
  return std::exp(u(rng));
}

double uniform(std::pair<double, double> range, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(range.first, range.second);
  return u(rng);
}

template <typename T>
T choice(const std::vector<T>& options, std::mt19937_64& rng) {
  if (options.empty()) throw Error(ErrorKind::Config, "search space has an empty choice list");
  std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
  return options[pick(rng)];
}

}  // namespace

void to_json(nlohmann::json& j, const SearchSpace& s) {
  j = nlohmann::json{{"learning_rate", s.learning_rate},     {"buffer_size", s.buffer_size},
                     {"gamma", s.gamma},                     {"tau", s.tau},
                     {"epsilon_start", s.epsilon_start},     {"epsilon_end", s.epsilon_end},
                     {"epsilon_fraction", s.epsilon_fraction}, {"batch_size", s.batch_size},
                     {"train_frequency", s.train_frequency}, {"gradient_steps", s.gradient_steps},
                     {"hidden_width", s.hidden_width}};
}

void from_json(const nlohmann::json& j, SearchSpace& s) {
  try {
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    opt("learning_rate", s.learning_rate);
    opt("buffer_size", s.buffer_size);
    opt("gamma", s.gamma);
    opt("tau", s.tau);
    opt("epsilon_start", s.epsilon_start);
    opt("epsilon_end", s.epsilon_end);
    opt("epsilon_fraction", s.epsilon_fraction);
    opt("batch_size", s.batch_size);
    opt("train_frequency", s.train_frequency);
    opt("gradient_steps", s.gradient_steps);
    opt("hidden_width", s.hidden_width);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("search space: ") + e.what());
  }
  if (!(s.learning_rate.first > 0.0 && s.tau.first > 0.0)) {
    throw Error(ErrorKind::Config, "search space: log-uniform ranges must be positive");
  }
  for (const auto* r : {&s.learning_rate, &s.gamma, &s.tau, &s.epsilon_start, &s.epsilon_end, &s.epsilon_fraction}) {
    if (!(r->first <= r->second)) throw Error(ErrorKind::Config, "search space: range bounds are reversed");
  }
  if (s.buffer_size.empty() || s.batch_size.empty() || s.train_frequency.empty() || s.gradient_steps.empty() ||
      s.hidden_width.empty()) {
    throw Error(ErrorKind::Config, "search space: choice lists must not be empty");
  }
}

DqnConfig sample_config(const SearchSpace& space, const DqnConfig& base, std::mt19937_64& rng) {
  DqnConfig c = base;
  c.learning_rate = log_uniform(space.learning_rate, rng);
  c.buffer_size = choice(space.buffer_size, rng);
  c.gamma = uniform(space.gamma, rng);
  c.tau = log_uniform(space.tau, rng);
  c.epsilon_start = uniform(space.epsilon_start, rng);
  c.epsilon_end = std::min(uniform(space.epsilon_end, rng), c.epsilon_start);
  c.epsilon_fraction = uniform(space.epsilon_fraction, rng);
  c.batch_size = choice(space.batch_size, rng);
  c.train_frequency = choice(space.train_frequency, rng);
  c.gradient_steps = choice(space.gradient_steps, rng);
  const int width = choice(space.hidden_width, rng);
  c.hidden.assign(base.hidden.size(), width);
  c.validate();
  return c;
}

TrialResult run_trial(const DqnConfig& config, std::uint64_t seed, const ContextPool& pool, const EnvConfig& env_config,
                      std::uint64_t steps, std::size_t eval_episodes) {
  TrialResult t;
  t.config = config;
  t.seed = seed;
  StoryEnv env(pool, env_config);
  auto trained = train(env, config, steps, seed);
  t.seconds = trained.log.seconds;
  t.loss_variance = trained.log.loss_variance();
  t.diverged = trained.log.diverged;
  t.divergence_reason = trained.log.divergence_reason;
  t.soft_diverged = trained.log.soft_diverged;
  t.max_abs_q = trained.log.max_abs_q;
  if (t.diverged) {
    t.mean_reward = -std::numeric_limits<double>::infinity();
    return t;
  }
  const auto eval = evaluate_policy(env, greedy_policy(trained.agent, kEvalEpsilon), eval_episodes,
                                    episode_seed(seed, 0xE7A1ull));
  t.mean_reward = eval.mean_reward;
  t.mean_hardness = eval.mean_hardness;
  return t;
}

std::vector<DqnConfig> draw_configs(const SearchSpace& space, const DqnConfig& base, std::size_t trials,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(episode_seed(seed, 0x7E57ull));
  std::vector<DqnConfig> configs;
  for (std::size_t i = 0; i < trials; ++i) configs.push_back(sample_config(space, base, rng));
  return configs;
}

TunerReport random_search(const SearchSpace& space, const DqnConfig& base, const ContextPool& pool,
                          const EnvConfig& env_config, const TunerOptions& options) {
  TunerReport report;
  report.trials.resize(options.trials);
  // Configurations are drawn up front so they do not depend on scheduling.
  const auto configs = draw_configs(space, base, options.trials, options.seed);

  parallel_for(options.trials, options.jobs, [&](std::size_t i) {
    report.trials[i] = run_trial(configs[i], episode_seed(options.seed, i), pool, env_config,
                                 options.steps_per_trial, options.eval_episodes);
    report.trials[i].index = i;
  });
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    const auto& t = report.trials[i];
    if (t.diverged) continue;
    if (!report.best || t.mean_reward > report.trials[*report.best].mean_reward) report.best = i;
  }
  return report;
}

nlohmann::json tuner_report_json(const TunerReport& r) {
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"index", t.index},
                      {"config", t.config},
                      {"seed", t.seed},
                      {"mean_reward", t.diverged ? nlohmann::json("-inf") : nlohmann::json(t.mean_reward)},
                      {"mean_hardness", t.mean_hardness},
                      {"diverged", t.diverged},
                      {"divergence_reason", t.divergence_reason},
                      {"soft_diverged", t.soft_diverged},
                      {"max_abs_q", t.max_abs_q},
                      {"loss_variance", std::isfinite(t.loss_variance) ? nlohmann::json(t.loss_variance) : nlohmann::json(nullptr)},
                      {"seconds", t.seconds}});
  }
  return {{"trials", trials}, {"best", r.best ? nlohmann::json(*r.best) : nlohmann::json(nullptr)}};
}

}  // namespace osct
