#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/actions.hpp"
#include "osct/beliefs.hpp"
#include "osct/event.hpp"
#include "osct/world.hpp"

namespace osct {

inline constexpr const char* kTraceSchema = "osct.trace/1";

// A finished story: the starting state, the applied events in order and the
// resulting state. Everything downstream (scoring, questions, rendering)
// reads from this.
struct StoryTrace {
  WorldState initial_world;
  BeliefState initial_beliefs;
  std::vector<StoryEvent> events;
  WorldState final_world;
  BeliefState final_beliefs;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }

  bool operator==(const StoryTrace&) const = default;
};

// Starts a trace at the given world with its initial beliefs.
StoryTrace start_trace(WorldState world);

// Folds recorded events over the initial state with apply_event.
StoryTrace replay_trace(const WorldSpec& spec, const std::vector<StoryEvent>& events);

nlohmann::json event_to_json(const StoryEvent& event, const WorldState& world);
StoryEvent event_from_json(const nlohmann::json& j, const WorldState& world);

nlohmann::json beliefs_to_json(const BeliefState& beliefs, const WorldState& world);

// Lossless JSON form. Loading re-simulates the events and rejects documents
// whose recorded final state disagrees with the re-simulation.
nlohmann::json trace_to_json(const StoryTrace& trace);
StoryTrace trace_from_json(const nlohmann::json& j);

StoryTrace load_trace(const std::string& path);
void save_trace(const StoryTrace& trace, const std::string& path);

}  // namespace osct
