#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "osct/tuner.hpp"

namespace osct {
namespace {

TEST(SampleConfig, StaysInsideTheSpace) {
  const SearchSpace space;
  const DqnConfig base;
  std::mt19937_64 rng(4);
  auto in = [](const auto& v, auto x) { return std::find(v.begin(), v.end(), x) != v.end(); };
  for (int i = 0; i < 2000; ++i) {
    const auto c = sample_config(space, base, rng);
    EXPECT_GE(c.learning_rate, 1e-4);
    EXPECT_LE(c.learning_rate, 1e-2);
    EXPECT_GE(c.gamma, 0.85);
    EXPECT_LE(c.gamma, 0.99);
    EXPECT_GE(c.tau, 0.005);
    EXPECT_LE(c.tau, 0.1);
    EXPECT_LE(c.epsilon_end, c.epsilon_start);
    EXPECT_TRUE(in(space.buffer_size, c.buffer_size));
    EXPECT_TRUE(in(space.batch_size, c.batch_size));
    EXPECT_TRUE(in(space.train_frequency, c.train_frequency));
    EXPECT_TRUE(in(space.gradient_steps, c.gradient_steps));
    ASSERT_EQ(c.hidden.size(), 2u);
    EXPECT_TRUE(in(space.hidden_width, c.hidden[0]));
    EXPECT_EQ(c.hidden[0], c.hidden[1]);
    EXPECT_EQ(c.learning_starts, base.learning_starts);
    EXPECT_NO_THROW(c.validate());
  }
}

TEST(SampleConfig, LearningRateIsLogUniform) {
  const SearchSpace space;
  std::mt19937_64 rng(6);
  int below = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) below += sample_config(space, {}, rng).learning_rate < 1e-3;
  // Half the log range lies below 1e-3.
  EXPECT_NEAR(below / static_cast<double>(n), 0.5, 0.03);
}

TEST(SearchSpace, JsonRoundTripAndValidation) {
  SearchSpace s;
  s.hidden_width = {32};
  const nlohmann::json j = s;
  EXPECT_EQ(j.get<SearchSpace>().hidden_width, std::vector<int>{32});
  nlohmann::json bad = j;
  bad["learning_rate"] = {0.1, 0.01};
  EXPECT_THROW(bad.get<SearchSpace>(), Error);
}

SearchSpace tiny_space() {
  SearchSpace s;
  s.hidden_width = {16};
  s.buffer_size = {500};
  s.batch_size = {16};
  return s;
}

TEST(RandomSearch, DeterministicAndPicksTheBestTrial) {
  DqnConfig base;
  base.learning_starts = 50;
  TunerOptions o;
  o.trials = 3;
  o.steps_per_trial = 300;
  o.eval_episodes = 3;
  o.seed = 12;
  const auto a = random_search(tiny_space(), base, testing::small_pool(), {}, o);
  o.jobs = 3;
  const auto b = random_search(tiny_space(), base, testing::small_pool(), {}, o);
  ASSERT_EQ(a.trials.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.trials[i].config, b.trials[i].config);
    EXPECT_EQ(a.trials[i].mean_reward, b.trials[i].mean_reward);
    EXPECT_EQ(a.trials[i].index, i);
  }
  ASSERT_TRUE(a.best);
  for (const auto& t : a.trials) {
    if (!t.diverged) {
      EXPECT_LE(t.mean_reward, a.trials[*a.best].mean_reward);
    }
  }
  // A reported trial reruns to the same numbers.
  const auto& best = a.trials[*a.best];
  const auto rerun = run_trial(best.config, best.seed, testing::small_pool(), {}, 300, 3);
  EXPECT_EQ(rerun.mean_reward, best.mean_reward);

  const auto j = tuner_report_json(a);
  EXPECT_EQ(j.at("trials").size(), 3u);
  EXPECT_EQ(j.at("best"), *a.best);
}

TEST(RunTrial, DivergedTrialScoresNegativeInfinity) {
  DqnConfig c;
  c.hidden = {16, 16};
  c.buffer_size = 500;
  c.batch_size = 16;
  c.learning_starts = 20;
  c.divergence_q_limit = 1e-9;
  const auto t = run_trial(c, 1, testing::small_pool(), {}, 200, 2);
  EXPECT_TRUE(t.diverged);
  EXPECT_TRUE(std::isinf(t.mean_reward) && t.mean_reward < 0);
}

}  // namespace
}  // namespace osct
