#include "osct/trace.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

namespace osct {

namespace {

using nlohmann::json;

AgentId agent_by_name(const WorldState& w, const json& j) {
  const auto name = j.get<std::string>();
  if (auto a = w.find_agent(name)) return *a;
  throw Error(ErrorKind::Parse, "unknown agent in trace: " + name);
}

json beliefs_json_impl(const BeliefState& beliefs, const WorldState& world) {
  json out = json::array();
  beliefs.for_each([&](const Chain& chain, ObjectId o, Location loc) {
    json names = json::array();
    for (AgentId a : chain.agents()) names.push_back(world.name(a));
    out.push_back({{"chain", names}, {"object", world.name(o)}, {"value", world.name(loc)}});
  });
  return out;
}

}  // namespace

StoryTrace start_trace(WorldState world) {
  StoryTrace t;
  t.initial_beliefs = initial_beliefs(world);
  t.final_beliefs = t.initial_beliefs;
  t.final_world = world;
  t.initial_world = std::move(world);
  return t;
}

StoryTrace replay_trace(const WorldSpec& spec, const std::vector<StoryEvent>& events) {
  StoryTrace t = start_trace(init_world(spec));
  for (const auto& ev : events) {
    auto [w, b] = apply_event(t.final_world, t.final_beliefs, ev);
    t.final_world = std::move(w);
    t.final_beliefs = std::move(b);
    t.events.push_back(ev);
  }
  return t;
}

json event_to_json(const StoryEvent& ev, const WorldState& w) {
  json j{{"step", ev.step_index}, {"action", action_name(ev.action)}, {"actor", w.name(ev.binding.actor)}};
  const Binding& b = ev.binding;
  if (b.target) j["target"] = w.name(*b.target);
  if (b.third) j["third"] = w.name(*b.third);
  if (b.object) j["object"] = w.name(*b.object);
  if (b.location) j["location"] = w.name(*b.location);
  if (b.room) j["room"] = w.name(*b.room);
  json vis = json::array();
  for (AgentId a : ev.visibility) vis.push_back(w.name(a));
  j["visibility"] = vis;
  json tags = json::array();
  for (Tag t : kAllTags) {
    if (ev.tags.has(t)) tags.push_back(tag_name(t));
  }
  j["tags"] = tags;
  return j;
}

StoryEvent event_from_json(const json& j, const WorldState& w) {
  StoryEvent ev;
  ev.step_index = j.at("step").get<std::size_t>();
  const auto name = j.at("action").get<std::string>();
  const auto action = action_from_name(name);
  if (!action) throw Error(ErrorKind::Parse, "unknown action in trace: " + name);
  ev.action = *action;
  ev.tags = spec_of(*action).tags;

  Binding& b = ev.binding;
  b.actor = agent_by_name(w, j.at("actor"));
  if (j.contains("target")) b.target = agent_by_name(w, j["target"]);
  if (j.contains("third")) b.third = agent_by_name(w, j["third"]);
  if (j.contains("object")) {
    const auto n = j["object"].get<std::string>();
    b.object = w.find_object(n);
    if (!b.object) throw Error(ErrorKind::Parse, "unknown object in trace: " + n);
  }
  if (j.contains("location")) {
    const auto n = j["location"].get<std::string>();
    b.location = w.find_location(n);
    if (!b.location) throw Error(ErrorKind::Parse, "unknown location in trace: " + n);
  }
  if (j.contains("room")) {
    const auto n = j["room"].get<std::string>();
    b.room = w.find_room(n);
    if (!b.room) throw Error(ErrorKind::Parse, "unknown room in trace: " + n);
  }
  if (j.contains("visibility")) {
    for (const auto& a : j["visibility"]) ev.visibility.push_back(agent_by_name(w, a));
    std::sort(ev.visibility.begin(), ev.visibility.end());
  }
  if (j.contains("tags")) {
    std::uint8_t bits = 0;
    for (const auto& t : j["tags"]) {
      bool known = false;
      for (Tag tag : kAllTags) {
        if (tag_name(tag) == t.get<std::string>()) {
          bits |= static_cast<std::uint8_t>(tag);
          known = true;
        }
      }
      if (!known) throw Error(ErrorKind::Parse, "unknown tag in trace");
    }
    if (bits != ev.tags.bits()) throw Error(ErrorKind::Parse, "event tags disagree with the catalog");
  }
  return ev;
}

json beliefs_to_json(const BeliefState& beliefs, const WorldState& world) {
  return beliefs_json_impl(beliefs, world);
}

json trace_to_json(const StoryTrace& t) {
  json events = json::array();
  for (const auto& ev : t.events) events.push_back(event_to_json(ev, t.initial_world));
  return json{{"schema", kTraceSchema},
              {"world", t.initial_world.to_spec()},
              {"events", events},
              {"final", {{"world", t.final_world.to_spec()},
                         {"beliefs", beliefs_json_impl(t.final_beliefs, t.final_world)}}}};
}

StoryTrace trace_from_json(const json& j) {
  try {
    if (j.value("schema", std::string{}) != kTraceSchema) {
      throw Error(ErrorKind::Parse, "unsupported trace schema");
    }
    const auto spec = j.at("world").get<WorldSpec>();
    const WorldState world = init_world(spec);
    std::vector<StoryEvent> events;
    for (const auto& e : j.at("events")) events.push_back(event_from_json(e, world));
    StoryTrace t = replay_trace(spec, events);
    if (j.contains("final")) {
      const auto& fin = j["final"];
      if (fin.contains("world") && fin["world"].get<WorldSpec>() != t.final_world.to_spec()) {
        throw Error(ErrorKind::Parse, "recorded final world disagrees with replay");
      }
      if (fin.contains("beliefs") && fin["beliefs"] != beliefs_json_impl(t.final_beliefs, t.final_world)) {
        throw Error(ErrorKind::Parse, "recorded final beliefs disagree with replay");
      }
    }
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed trace: ") + e.what());
  }
}

StoryTrace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open trace: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "malformed trace " + path + ": " + e.what());
  }
  return trace_from_json(j);
}

void save_trace(const StoryTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write trace: " + path);
  out << trace_to_json(trace).dump(2) << '\n';
}

}  // namespace osct
