#pragma once

#include <string>
#include <utility>
#include <vector>

#include "osct/trace.hpp"

namespace osct {

// Deterministic English rendering. The first paragraph describes the starting
// world; after a blank line comes one sentence per event, one per line.
// Events that co-present agents do not perceive end in "without X noticing".
std::string render_template(const StoryTrace& trace);

// Sentence for a single event given the state just before it.
std::string render_event(const StoryEvent& event, const WorldState& before);

struct ParsedEvent {
  ActionId action{};
  Binding binding;

  bool operator==(const ParsedEvent&) const = default;
};

// Recovers the action and role arguments of every event line of a
// render_template text. Names are resolved against the world. Throws
// Error(Parse) on a line no template matches.
std::vector<ParsedEvent> parse_rendered(const std::string& text, const WorldState& world);

}  // namespace osct
