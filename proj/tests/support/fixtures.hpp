#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "osct/dqn.hpp"
#include "osct/trace.hpp"

namespace osct::testing {

// Builds a trace by applying named events in order through the public API.
struct NamedStep {
  std::string action;
  std::string actor, target, third, object, location, room;
};
StoryTrace script(const WorldSpec& spec, const std::vector<NamedStep>& steps);

// Sally leaves, Anne moves the ball from the basket to the box, Sally returns,
// Anne leaves.
WorldSpec sally_anne_world();
StoryTrace sally_anne();

// Alice and Bob both see the ball on the kitchen floor; Alice then tells Bob
// it is in the basket.
StoryTrace lie_script();

// Alice peeks at the ring in the chest, then bluffs to Bob that it is in the
// garden so that Carol will hear it; a few movements follow.
StoryTrace double_bluff_script();

// Random legal story: each step picks an action uniformly among those with a
// legal binding, then one of its bindings uniformly. Worlds have 2..max_agents agents.
StoryTrace random_story(std::uint64_t seed, std::size_t max_events = 12, int max_agents = 4);

// A deliberately small context pool for quick training.
ContextPool small_pool();

}  // namespace osct::testing
