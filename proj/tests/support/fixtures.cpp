#include "fixtures.hpp"

#include <stdexcept>

namespace osct::testing {

StoryTrace script(const WorldSpec& spec, const std::vector<NamedStep>& steps) {
  StoryTrace t = start_trace(init_world(spec));
  for (const auto& s : steps) {
    const auto& w = t.final_world;
    const auto action = action_from_name(s.action);
    if (!action) throw std::invalid_argument("unknown action " + s.action);
    Binding b;
    b.actor = w.find_agent(s.actor).value();
    if (!s.target.empty()) b.target = w.find_agent(s.target).value();
    if (!s.third.empty()) b.third = w.find_agent(s.third).value();
    if (!s.object.empty()) b.object = w.find_object(s.object).value();
    if (!s.location.empty()) b.location = w.find_location(s.location).value();
    if (!s.room.empty()) b.room = w.find_room(s.room).value();
    t.events.push_back(apply_in_place(*action, b, t.final_world, t.final_beliefs, t.events.size()));
  }
  return t;
}

WorldSpec sally_anne_world() {
  WorldSpec spec;
  spec.agents = {"Sally", "Anne"};
  spec.rooms = {{"room", {"basket", "box"}}, {"hallway", {}}};
  spec.objects = {"ball"};
  spec.agent_placements = {{"Sally", "room"}, {"Anne", "room"}};
  spec.object_placements = {{"ball", "basket"}};
  return spec;
}

StoryTrace sally_anne() {
  return script(sally_anne_world(), {
                                        {.action = "leave_room", .actor = "Sally", .room = "hallway"},
                                        {.action = "place_object", .actor = "Anne", .object = "ball", .location = "box"},
                                        {.action = "enter_room", .actor = "Sally", .room = "room"},
                                        {.action = "leave_room", .actor = "Anne", .room = "hallway"},
                                    });
}

StoryTrace lie_script() {
  WorldSpec spec;
  spec.agents = {"Alice", "Bob"};
  spec.rooms = {{"kitchen", {"basket"}}, {"garden", {}}};
  spec.objects = {"ball"};
  spec.agent_placements = {{"Alice", "kitchen"}, {"Bob", "kitchen"}};
  spec.object_placements = {{"ball", "kitchen"}};
  return script(spec, {
                          {.action = "observe_room", .actor = "Alice"},
                          {.action = "lie_about_location", .actor = "Alice", .target = "Bob", .object = "ball",
                           .location = "basket"},
                      });
}

StoryTrace double_bluff_script() {
  WorldSpec spec;
  spec.agents = {"Alice", "Bob", "Carol"};
  spec.rooms = {{"hall", {"chest"}}, {"garden", {}}};
  spec.objects = {"ring"};
  spec.agent_placements = {{"Alice", "hall"}, {"Bob", "hall"}, {"Carol", "hall"}};
  spec.object_placements = {{"ring", "chest"}};
  return script(spec, {
                          {.action = "peek_into_container", .actor = "Alice", .location = "chest"},
                          {.action = "double_bluff", .actor = "Alice", .target = "Bob", .third = "Carol",
                           .object = "ring", .location = "garden"},
                          {.action = "leave_room", .actor = "Carol", .room = "garden"},
                          {.action = "enter_room", .actor = "Carol", .room = "hall"},
                          {.action = "witness_silently", .actor = "Alice", .object = "ring"},
                          {.action = "leave_room", .actor = "Bob", .room = "garden"},
                      });
}

ContextPool small_pool() {
  ContextPool pool;
  pool.agent_names = {"Alice", "Bob", "Carol", "Dave", "Erin", "Frank", "Grace", "Heidi"};
  pool.room_layouts = {{{"kitchen", {"basket", "cupboard"}}, {"hallway", {"box"}}},
                       {{"garden", {"shed"}}, {"study", {"drawer", "chest"}}}};
  pool.object_inventories = {{"ball", "key", "apple"}};
  pool.min_agents = 2;
  pool.max_agents = 3;
  pool.min_objects = 1;
  pool.max_objects = 2;
  return pool;
}

StoryTrace random_story(std::uint64_t seed, std::size_t max_events, int max_agents) {
  std::mt19937_64 rng(seed);
  ContextPool pool = default_context_pool();
  pool.max_agents = max_agents;
  StoryTrace t = start_trace(init_world(sample_world(pool, rng)));
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_events)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<Binding>> by_action;
    std::vector<ActionId> actions;
    for (const auto& spec : catalog()) {
      auto bindings = legal_bindings(t.final_world, t.final_beliefs, spec.id);
      if (bindings.empty()) continue;
      actions.push_back(spec.id);
      by_action.push_back(std::move(bindings));
    }
    if (actions.empty()) break;
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, actions.size() - 1)(rng);
    const auto& options = by_action[a];
    const Binding& binding = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    t.events.push_back(apply_in_place(actions[a], binding, t.final_world, t.final_beliefs, t.events.size()));
  }
  return t;
}

}  // namespace osct::testing
