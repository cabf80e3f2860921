#include <benchmark/benchmark.h>

#include <random>

#include "osct/actions.hpp"
#include "osct/dqn.hpp"
#include "osct/env.hpp"
#include "osct/scoring.hpp"

namespace {

using namespace osct;

WorldSpec crowded_world(int agents) {
  WorldSpec spec;
  spec.rooms = {{"hall", {"chest", "box"}}, {"garden", {"shed"}}};
  spec.objects = {"ring", "key"};
  spec.object_placements = {{"ring", "hall"}, {"key", "chest"}};
  for (int i = 0; i < agents; ++i) {
    const auto name = "A" + std::to_string(i);
    spec.agents.push_back(name);
    spec.agent_placements[name] = "hall";
  }
  return spec;
}

void BM_BroadcastAnnouncement(benchmark::State& state) {
  const auto world = init_world(crowded_world(static_cast<int>(state.range(0))));
  const auto beliefs = initial_beliefs(world);
  Binding b;
  b.actor = make_id<AgentId>(0);
  b.object = make_id<ObjectId>(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply(ActionId::AnnouncePublicly, b, world, beliefs));
  }
}
BENCHMARK(BM_BroadcastAnnouncement)->Arg(2)->Arg(4)->Arg(6);

void BM_LegalBindings(benchmark::State& state) {
  const auto world = init_world(crowded_world(4));
  const auto beliefs = initial_beliefs(world);
  const auto action = static_cast<ActionId>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(legal_bindings(world, beliefs, action));
}
BENCHMARK(BM_LegalBindings)->DenseRange(0, kActionCount - 1);

void BM_EnvEpisode(benchmark::State& state) {
  StoryEnv env;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, kActionCount - 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    env.reset(++seed);
    while (!env.done()) benchmark::DoNotOptimize(env.step(pick(rng)));
  }
  state.SetItemsProcessed(state.iterations() * env.config().episode_length);
}
BENCHMARK(BM_EnvEpisode);

void BM_Score(benchmark::State& state) {
  StoryEnv env;
  env.reset(3);
  std::mt19937_64 rng(2);
  while (!env.done()) env.step(static_cast<int>(rng() % kActionCount));
  const auto trace = env.episode_trace();
  for (auto _ : state) benchmark::DoNotOptimize(score(trace));
}
BENCHMARK(BM_Score);

void BM_DqnLearn(benchmark::State& state) {
  DqnConfig c;
  c.batch_size = static_cast<std::size_t>(state.range(0));
  DqnAgent agent(c, 1);
  ReplayBuffer buffer(4096);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (int i = 0; i < 4096; ++i) {
    Transition t;
    for (auto& x : t.observation) x = u(rng);
    for (auto& x : t.next_observation) x = u(rng);
    t.action = static_cast<int>(rng() % kActionCount);
    t.reward = u(rng);
    buffer.push(t);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.learn(make_batch(buffer, buffer.sample_indices(c.batch_size, rng))));
  }
}
BENCHMARK(BM_DqnLearn)->Arg(32)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
