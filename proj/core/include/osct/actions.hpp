#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/beliefs.hpp"
#include "osct/event.hpp"
#include "osct/world.hpp"

namespace osct {

enum class Role : std::uint8_t { Actor, Target, Third, Object, Location, Room };

std::string_view role_name(Role r) noexcept;

struct ActionSpec {
  ActionId id;
  std::string_view name;
  std::vector<Role> roles;
  TagSet tags;
  bool deceptive;
};

// The fixed 15-action alphabet, indexed by ActionId.
std::span<const ActionSpec> catalog();
const ActionSpec& spec_of(ActionId id);
std::optional<ActionId> action_from_name(std::string_view name) noexcept;
std::string_view action_name(ActionId id);

// actions.json reference document.
nlohmann::json catalog_json();

// Empty when legal, otherwise a human-readable reason.
std::optional<std::string> check_legal(const WorldState& world, const BeliefState& beliefs, ActionId action,
                                       const Binding& binding);
inline bool is_legal(const WorldState& world, const BeliefState& beliefs, ActionId action,
                     const Binding& binding) {
  return !check_legal(world, beliefs, action, binding).has_value();
}

// Every legal binding of one action, in a fixed deterministic order.
std::vector<Binding> legal_bindings(const WorldState& world, const BeliefState& beliefs, ActionId action);
bool has_legal_binding(const WorldState& world, const BeliefState& beliefs, ActionId action);
std::vector<std::pair<ActionId, Binding>> legal_actions(const WorldState& world, const BeliefState& beliefs);

// Applies a legal (action, binding) in place and returns the recorded event.
// Throws Error(IllegalAction) if the binding is not legal; state is then untouched.
StoryEvent apply_in_place(ActionId action, const Binding& binding, WorldState& world, BeliefState& beliefs,
                          std::size_t step_index);

struct Applied {
  WorldState world;
  BeliefState beliefs;
  StoryEvent event;
};

Applied apply(ActionId action, const Binding& binding, const WorldState& world, const BeliefState& beliefs,
              std::size_t step_index = 0);

// Replays a recorded event. The recorded visibility and tags must match what
// the action produces in this state.
std::pair<WorldState, BeliefState> apply_event(const WorldState& world, const BeliefState& beliefs,
                                               const StoryEvent& event);

// Agents whose beliefs an event may touch: its visibility set plus the target
// of a memory implant, who is affected without perceiving anything.
std::vector<AgentId> affected_agents(const StoryEvent& event);

// True when the event changes where some object actually is.
bool moves_object(const StoryEvent& event) noexcept;

}  // namespace osct
