#include <gtest/gtest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "osct/env.hpp"

namespace osct {
namespace {

TEST(Env, ResetIsDeterministic) {
  StoryEnv a, b;
  EXPECT_EQ(a.reset(5), b.reset(5));
  for (int i = 0; i < 15; ++i) {
    const auto ra = a.step(i % 15);
    const auto rb = b.step(i % 15);
    EXPECT_EQ(ra.observation, rb.observation);
    EXPECT_EQ(ra.reward, rb.reward);
  }
  EXPECT_EQ(a.episode_trace(), b.episode_trace());
}

TEST(Env, ObservationIsBoundedAndPaddedWithZeros) {
  StoryEnv env;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto o = env.reset(seed);
    while (!env.done()) {
      for (std::size_t i = 0; i < kObservationSize; ++i) {
        ASSERT_TRUE(std::isfinite(o[i]));
        ASSERT_GE(o[i], 0.0f);
        ASSERT_LE(o[i], 1.0f);
        if (i >= obs::kUnused) {
          ASSERT_EQ(o[i], 0.0f);
        }
      }
      o = env.step(static_cast<int>(seed + env.steps_taken()) % 15).observation;
    }
  }
}

TEST(Env, LegalMaskSlotsMatchLegalMask) {
  StoryEnv env;
  const auto o = env.reset(3);
  const auto mask = env.legal_mask();
  for (std::size_t a = 0; a < kActionCount; ++a) EXPECT_EQ(o[obs::kLegalMask + a], mask[a] ? 1.0f : 0.0f);
}

TEST(Env, StateErrors) {
  StoryEnv env;
  EXPECT_THROW(env.step(0), Error);
  env.reset(1);
  EXPECT_THROW(env.step(15), Error);
  EXPECT_THROW(env.step(-1), Error);
  EXPECT_THROW(env.episode_trace(), Error);
  for (int i = 0; i < 15; ++i) env.step(6);
  EXPECT_TRUE(env.done());
  EXPECT_THROW(env.step(0), Error);
}

TEST(Env, IllegalActionIsPenalisedAndCountsAsAStep) {
  StoryEnv env;
  env.reset_with(testing::sally_anne_world(), 0);
  // Only two agents: a double bluff is never legal.
  const auto r = env.step(static_cast<int>(ActionId::DoubleBluff));
  EXPECT_FALSE(r.info.legal);
  EXPECT_DOUBLE_EQ(r.reward, -0.05);
  EXPECT_EQ(env.steps_taken(), 1);
  EXPECT_TRUE(env.current_trace().empty());
}

TEST(Env, LegalNonTerminalStepsEarnNothing) {
  StoryEnv env;
  env.reset(9);
  for (int i = 0; i < 14; ++i) {
    const auto r = env.step(i);
    if (r.info.legal) {
      EXPECT_EQ(r.reward, 0.0);
    }
    EXPECT_FALSE(r.done);
  }
}

// Terminal reward recomputed from the returned report and the phase weights.
TEST(Env, TerminalRewardFollowsPhaseWeights) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    StoryEnv env;
    env.reset(seed);
    const int phase = 1 + static_cast<int>(seed % 3);
    const auto w = kDefaultPhaseWeights[static_cast<std::size_t>(phase - 1)];
    env.set_phase({phase, w.hardness, w.diversity, w.validity});
    StepResult last;
    std::set<int> used;
    for (int i = 0; i < 15; ++i) {
      const int a = static_cast<int>((seed * 7 + static_cast<std::uint64_t>(i) * 4) % 15);
      last = env.step(a);
      if (last.info.legal) used.insert(a);
    }
    ASSERT_TRUE(last.done);
    ASSERT_TRUE(last.info.report);
    const auto& rep = *last.info.report;
    const double diversity = static_cast<double>(used.size()) / 15.0;
    EXPECT_DOUBLE_EQ(last.info.diversity, diversity);
    double expected = rep.has_false_belief ? w.hardness * rep.composite_h + w.diversity * diversity + w.validity : -1.0;
    if (!last.info.legal) expected += -0.05;
    expected = std::clamp(expected, -1.0, 1.0);
    EXPECT_NEAR(last.reward, expected, 1e-12);
    if (!rep.has_false_belief) {
      EXPECT_LE(last.reward, 0.0);
    }
  }
}

TEST(Env, CurriculumThirds) {
  EXPECT_EQ(curriculum_weights(0, 300).phase, 1);
  EXPECT_EQ(curriculum_weights(99, 300).phase, 1);
  EXPECT_EQ(curriculum_weights(100, 300).phase, 2);
  EXPECT_EQ(curriculum_weights(199, 300).phase, 2);
  EXPECT_EQ(curriculum_weights(200, 300).phase, 3);
  EXPECT_DOUBLE_EQ(curriculum_weights(299, 300).w_hardness, 0.8);
  for (const auto& w : kDefaultPhaseWeights) EXPECT_NEAR(w.hardness + w.diversity + w.validity, 1.0, 1e-12);
}

TEST(Env, SampledWorldsRespectThePool) {
  const auto pool = testing::small_pool();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto spec = sample_world(pool, rng);
    EXPECT_GE(spec.agents.size(), 2u);
    EXPECT_LE(spec.agents.size(), 3u);
    EXPECT_LE(spec.objects.size(), 2u);
    const WorldState w = init_world(spec);
    EXPECT_EQ(w.agent_room(make_id<AgentId>(0)), w.agent_room(make_id<AgentId>(1)));
  }
}

TEST(Env, EmptyPoolIsRejected) {
  std::mt19937_64 rng(0);
  EXPECT_THROW(sample_world(ContextPool{}, rng), Error);
}

TEST(Env, ConfigJsonValidates) {
  EnvConfig c;
  const nlohmann::json j = c;
  const auto back = j.get<EnvConfig>();
  EXPECT_EQ(back.episode_length, 15);
  auto bad = j;
  bad["phase_weights"][0]["validity"] = 0.9;
  EXPECT_THROW(bad.get<EnvConfig>(), Error);
}

TEST(Env, PoolJsonRoundTrip) {
  const auto pool = testing::small_pool();
  const nlohmann::json j = pool;
  const auto back = j.get<ContextPool>();
  EXPECT_EQ(back.agent_names, pool.agent_names);
  EXPECT_EQ(back.room_layouts, pool.room_layouts);
  EXPECT_EQ(back.max_agents, pool.max_agents);
}

}  // namespace
}  // namespace osct
