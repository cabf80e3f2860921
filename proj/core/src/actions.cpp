#include "osct/actions.hpp"

#include <algorithm>
#include <array>

#include <nlohmann/json.hpp>

namespace osct {

namespace {

const std::vector<ActionSpec>& catalog_storage() {
  static const std::vector<ActionSpec> specs{
      {ActionId::EnterRoom, "enter_room", {Role::Actor, Role::Room}, {Tag::Physical}, false},
      {ActionId::LeaveRoom, "leave_room", {Role::Actor, Role::Room}, {Tag::Physical}, false},
      {ActionId::MoveObject, "move_object", {Role::Actor, Role::Object, Role::Location}, {Tag::Physical}, false},
      {ActionId::HideObject, "hide_object", {Role::Actor, Role::Object, Role::Location}, {Tag::Physical}, false},
      {ActionId::PlaceObject, "place_object", {Role::Actor, Role::Object, Role::Location}, {Tag::Physical}, false},
      {ActionId::PeekIntoContainer, "peek_into_container", {Role::Actor, Role::Location}, {Tag::Observation}, false},
      {ActionId::ObserveRoom, "observe_room", {Role::Actor}, {Tag::Observation}, false},
      {ActionId::TellLocationTruthfully, "tell_location_truthfully", {Role::Actor, Role::Target, Role::Object}, {Tag::Communication},
       false},
      {ActionId::AskLocation, "ask_location", {Role::Actor, Role::Target, Role::Object}, {Tag::Communication}, false},
      {ActionId::AnnouncePublicly, "announce_publicly", {Role::Actor, Role::Object}, {Tag::Communication}, false},
      {ActionId::WitnessSilently, "witness_silently", {Role::Actor, Role::Object}, {Tag::Observation}, false},
      {ActionId::LieAboutLocation, "lie_about_location", {Role::Actor, Role::Target, Role::Object, Role::Location},
       {Tag::Communication, Tag::Deceptive}, true},
      {ActionId::OneWayMirrorObservation, "one_way_mirror_observation", {Role::Actor, Role::Room}, {Tag::Observation}, false},
      {ActionId::DoubleBluff, "double_bluff", {Role::Actor, Role::Target, Role::Third, Role::Object, Role::Location},
       {Tag::Communication, Tag::Deceptive}, true},
      {ActionId::FakeMemoryImplant, "fake_memory_implant", {Role::Actor, Role::Target, Role::Object, Role::Location}, {Tag::Deceptive}, true},
  };
  return specs;
}

bool has_role(const ActionSpec& spec, Role r) {
  return std::find(spec.roles.begin(), spec.roles.end(), r) != spec.roles.end();
}

bool agent_ok(const WorldState& w, AgentId a) { return idx(a) < w.agent_count(); }
bool object_ok(const WorldState& w, ObjectId o) { return idx(o) < w.object_count(); }

bool knows_truth(const WorldState& w, const BeliefState& b, AgentId a, ObjectId o) {
  return b.query(a, o) == BeliefValue{w.object_location(o)};
}

std::optional<std::string> check_shape(const WorldState& w, const ActionSpec& spec, const Binding& b) {
  auto expect = [&](Role r, bool present) -> std::optional<std::string> {
    if (has_role(spec, r) != present) {
      return std::string(present ? "missing" : "unexpected") + " role '" + std::string(role_name(r)) + "'";
    }
    return std::nullopt;
  };
  if (auto e = expect(Role::Target, b.target.has_value())) return e;
  if (auto e = expect(Role::Third, b.third.has_value())) return e;
  if (auto e = expect(Role::Object, b.object.has_value())) return e;
  if (auto e = expect(Role::Location, b.location.has_value())) return e;
  if (auto e = expect(Role::Room, b.room.has_value())) return e;

  if (!agent_ok(w, b.actor)) return "unknown actor";
  if (b.target && !agent_ok(w, *b.target)) return "unknown target agent";
  if (b.third && !agent_ok(w, *b.third)) return "unknown third agent";
  if (b.object && !object_ok(w, *b.object)) return "unknown object";
  if (b.location && !w.valid_location(*b.location)) return "unknown location";
  if (b.room && idx(*b.room) >= w.room_count()) return "unknown room";
  return std::nullopt;
}

// Claimed location of a lie: must contradict both reality and the liar's own belief.
std::optional<std::string> check_false_claim(const WorldState& w, const BeliefState& beliefs, const Binding& b) {
  const BeliefValue own = beliefs.query(b.actor, *b.object);
  if (!own) return "actor has no belief about the object";
  if (*b.location == w.object_location(*b.object)) return "claimed location is the true location";
  if (*b.location == *own) return "claimed location is the actor's own belief";
  return std::nullopt;
}

std::optional<std::string> check_co_present_target(const WorldState& w, const Binding& b) {
  if (*b.target == b.actor) return "target must differ from actor";
  if (w.agent_room(*b.target) != w.agent_room(b.actor)) return "target is not in the actor's room";
  return std::nullopt;
}

bool has_company(const WorldState& w, AgentId actor) { return w.agents_in(w.agent_room(actor)).size() > 1; }

std::vector<AgentId> merged(std::vector<AgentId> a, const std::vector<AgentId>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

std::optional<ActionId> action_from_index(int index) noexcept {
  if (index < 0 || index >= static_cast<int>(kActionCount)) return std::nullopt;
  return static_cast<ActionId>(index);
}

std::string_view tag_name(Tag t) noexcept {
  switch (t) {
    case Tag::Physical: return "physical";
    case Tag::Communication: return "communication";
    case Tag::Deceptive: return "deceptive";
    case Tag::Observation: return "observation";
  }
  return "?";
}

std::string_view role_name(Role r) noexcept {
  switch (r) {
    case Role::Actor: return "actor";
    case Role::Target: return "target";
    case Role::Third: return "third";
    case Role::Object: return "object";
    case Role::Location: return "location";
    case Role::Room: return "room";
  }
  return "?";
}

std::span<const ActionSpec> catalog() { return catalog_storage(); }

const ActionSpec& spec_of(ActionId id) { return catalog_storage().at(idx(id)); }

std::string_view action_name(ActionId id) { return spec_of(id).name; }

std::optional<ActionId> action_from_name(std::string_view name) noexcept {
  for (const auto& s : catalog_storage()) {
    if (s.name == name) return s.id;
  }
  return std::nullopt;
}

nlohmann::json catalog_json() {
  nlohmann::json actions = nlohmann::json::array();
  for (const auto& s : catalog()) {
    nlohmann::json roles = nlohmann::json::array();
    for (Role r : s.roles) roles.push_back(role_name(r));
    nlohmann::json tags = nlohmann::json::array();
    for (Tag t : kAllTags) {
      if (s.tags.has(t)) tags.push_back(tag_name(t));
    }
    actions.push_back({{"id", idx(s.id)}, {"name", s.name}, {"roles", roles}, {"tags", tags}, {"deceptive", s.deceptive}});
  }
  return {{"schema", "osct.actions/1"}, {"actions", actions}};
}

std::optional<std::string> check_legal(const WorldState& w, const BeliefState& beliefs, ActionId action,
                                       const Binding& b) {
  if (idx(action) >= kActionCount) return "unknown action id";
  if (auto e = check_shape(w, spec_of(action), b)) return e;

  const RoomId here = w.agent_room(b.actor);
  switch (action) {
    case ActionId::EnterRoom:
    case ActionId::LeaveRoom:
      if (*b.room == here) return "actor is already in that room";
      return std::nullopt;

    case ActionId::MoveObject:
      if (w.object_room(*b.object) != here) return "object is out of reach";
      if (!b.location->is_room() || b.location->as_room() == here) return "destination must be another room";
      return std::nullopt;

    case ActionId::HideObject:
      if (w.object_room(*b.object) != here) return "object is out of reach";
      if (!b.location->is_container() || w.room_of(*b.location) != here) {
        return "hiding place must be a container in the actor's room";
      }
      if (*b.location == w.object_location(*b.object)) return "object is already there";
      return std::nullopt;

    case ActionId::PlaceObject:
      if (w.object_room(*b.object) != here) return "object is out of reach";
      if (w.room_of(*b.location) != here) return "destination must be in the actor's room";
      if (*b.location == w.object_location(*b.object)) return "object is already there";
      return std::nullopt;

    case ActionId::PeekIntoContainer:
      if (!b.location->is_container() || w.room_of(*b.location) != here) {
        return "container must be in the actor's room";
      }
      if (w.objects_in(b.location->as_container()).empty()) return "container is empty";
      return std::nullopt;

    case ActionId::ObserveRoom:
      if (w.visible_objects(here).empty()) return "nothing visible in the room";
      return std::nullopt;

    case ActionId::TellLocationTruthfully:
      if (auto e = check_co_present_target(w, b)) return e;
      if (!knows_truth(w, beliefs, b.actor, *b.object)) return "actor does not know where the object is";
      return std::nullopt;

    case ActionId::AskLocation:
      if (auto e = check_co_present_target(w, b)) return e;
      if (!knows_truth(w, beliefs, *b.target, *b.object)) return "target does not know where the object is";
      return std::nullopt;

    case ActionId::AnnouncePublicly:
      if (!has_company(w, b.actor)) return "nobody to announce to";
      if (!knows_truth(w, beliefs, b.actor, *b.object)) return "actor does not know where the object is";
      return std::nullopt;

    case ActionId::WitnessSilently:
      if (!has_company(w, b.actor)) return "nobody to watch";
      if (w.object_room(*b.object) != here) return "object is not in the actor's room";
      return std::nullopt;

    case ActionId::LieAboutLocation:
    case ActionId::FakeMemoryImplant:
      if (auto e = check_co_present_target(w, b)) return e;
      return check_false_claim(w, beliefs, b);

    case ActionId::OneWayMirrorObservation:
      if (*b.room == here) return "watched room must differ from the actor's room";
      if (w.visible_objects(*b.room).empty()) return "nothing visible in the watched room";
      return std::nullopt;

    case ActionId::DoubleBluff:
      if (auto e = check_co_present_target(w, b)) return e;
      if (*b.third == b.actor || *b.third == *b.target) return "bluff needs three distinct agents";
      return check_false_claim(w, beliefs, b);
  }
  return "unknown action id";
}

std::vector<Binding> legal_bindings(const WorldState& w, const BeliefState& beliefs, ActionId action) {
  std::vector<Binding> out;
  const auto agents = w.agent_count();
  const auto objects = w.object_count();
  const auto all_locs = w.all_locations();

  for (std::size_t ai = 0; ai < agents; ++ai) {
    const AgentId actor = make_id<AgentId>(ai);
    const RoomId here = w.agent_room(actor);
    const auto company = w.agents_in(here);
    auto push = [&](Binding b) {
      if (is_legal(w, beliefs, action, b)) out.push_back(b);
    };

    switch (action) {
      case ActionId::EnterRoom:
      case ActionId::LeaveRoom:
      case ActionId::OneWayMirrorObservation:
        for (std::size_t r = 0; r < w.room_count(); ++r) push({.actor = actor, .room = make_id<RoomId>(r)});
        break;

      case ActionId::MoveObject:
      case ActionId::HideObject:
      case ActionId::PlaceObject:
        for (std::size_t o = 0; o < objects; ++o) {
          const ObjectId object = make_id<ObjectId>(o);
          if (w.object_room(object) != here) continue;
          for (Location loc : all_locs) push({.actor = actor, .object = object, .location = loc});
        }
        break;

      case ActionId::PeekIntoContainer:
        for (ContainerId c : w.containers_in(here)) push({.actor = actor, .location = Location::container(c)});
        break;

      case ActionId::ObserveRoom:
        push({.actor = actor});
        break;

      case ActionId::TellLocationTruthfully:
      case ActionId::AskLocation:
        for (AgentId target : company) {
          if (target == actor) continue;
          for (std::size_t o = 0; o < objects; ++o) {
            push({.actor = actor, .target = target, .object = make_id<ObjectId>(o)});
          }
        }
        break;

      case ActionId::AnnouncePublicly:
      case ActionId::WitnessSilently:
        for (std::size_t o = 0; o < objects; ++o) push({.actor = actor, .object = make_id<ObjectId>(o)});
        break;

      case ActionId::LieAboutLocation:
      case ActionId::FakeMemoryImplant:
        for (AgentId target : company) {
          if (target == actor) continue;
          for (std::size_t o = 0; o < objects; ++o) {
            for (Location loc : all_locs) {
              push({.actor = actor, .target = target, .object = make_id<ObjectId>(o), .location = loc});
            }
          }
        }
        break;

      case ActionId::DoubleBluff:
        for (AgentId target : company) {
          if (target == actor) continue;
          for (std::size_t t = 0; t < agents; ++t) {
            const AgentId third = make_id<AgentId>(t);
            if (third == actor || third == target) continue;
            for (std::size_t o = 0; o < objects; ++o) {
              for (Location loc : all_locs) {
                push({.actor = actor, .target = target, .third = third, .object = make_id<ObjectId>(o),
                      .location = loc});
              }
            }
          }
        }
        break;
    }
  }
  return out;
}

bool has_legal_binding(const WorldState& world, const BeliefState& beliefs, ActionId action) {
  // Cheap necessary conditions first; most masks are decided here.
  switch (action) {
    case ActionId::DoubleBluff:
      if (world.agent_count() < 3) return false;
      break;
    default:
      break;
  }
  return !legal_bindings(world, beliefs, action).empty();
}

std::vector<std::pair<ActionId, Binding>> legal_actions(const WorldState& world, const BeliefState& beliefs) {
  std::vector<std::pair<ActionId, Binding>> out;
  for (const auto& spec : catalog()) {
    for (auto& b : legal_bindings(world, beliefs, spec.id)) out.emplace_back(spec.id, std::move(b));
  }
  return out;
}

StoryEvent apply_in_place(ActionId action, const Binding& b, WorldState& w, BeliefState& beliefs,
                          std::size_t step_index) {
  if (auto reason = check_legal(w, beliefs, action, b)) {
    throw Error(ErrorKind::IllegalAction, std::string(action_name(action)) + ": " + *reason);
  }

  StoryEvent ev;
  ev.step_index = step_index;
  ev.action = action;
  ev.binding = b;
  ev.tags = spec_of(action).tags;

  const AgentId actor = b.actor;
  const RoomId here = w.agent_room(actor);
  const std::array<AgentId, 1> alone{actor};

  switch (action) {
    case ActionId::EnterRoom: {
      w.move_agent(actor, *b.room);
      ev.visibility = w.agents_in(*b.room);
      for (ObjectId o : w.visible_objects(*b.room)) beliefs.broadcast(ev.visibility, o, Location::room(*b.room));
      break;
    }
    case ActionId::LeaveRoom: {
      ev.visibility = w.agents_in(here);
      w.move_agent(actor, *b.room);
      break;
    }
    case ActionId::MoveObject: {
      ev.visibility = merged(w.agents_in(here), w.agents_in(b.location->as_room()));
      w.move_object(*b.object, *b.location);
      beliefs.broadcast(ev.visibility, *b.object, *b.location);
      break;
    }
    case ActionId::HideObject: {
      ev.visibility = {actor};
      w.move_object(*b.object, *b.location);
      beliefs.broadcast(alone, *b.object, *b.location);
      break;
    }
    case ActionId::PlaceObject: {
      ev.visibility = w.agents_in(here);
      w.move_object(*b.object, *b.location);
      beliefs.broadcast(ev.visibility, *b.object, *b.location);
      break;
    }
    case ActionId::PeekIntoContainer: {
      ev.visibility = {actor};
      for (ObjectId o : w.objects_in(b.location->as_container())) beliefs.broadcast(alone, o, *b.location);
      break;
    }
    case ActionId::ObserveRoom: {
      ev.visibility = w.agents_in(here);
      for (ObjectId o : w.visible_objects(here)) beliefs.broadcast(ev.visibility, o, Location::room(here));
      break;
    }
    case ActionId::TellLocationTruthfully:
    case ActionId::AskLocation: {
      ev.visibility = merged({actor}, {*b.target});
      beliefs.broadcast(ev.visibility, *b.object, w.object_location(*b.object));
      break;
    }
    case ActionId::AnnouncePublicly: {
      ev.visibility = w.agents_in(here);
      beliefs.broadcast(ev.visibility, *b.object, w.object_location(*b.object));
      break;
    }
    case ActionId::WitnessSilently: {
      ev.visibility = {actor};
      beliefs.broadcast(alone, *b.object, w.object_location(*b.object));
      break;
    }
    case ActionId::LieAboutLocation: {
      ev.visibility = merged({actor}, {*b.target});
      beliefs.set(Chain{*b.target}, *b.object, *b.location);
      beliefs.set(Chain{actor, *b.target}, *b.object, *b.location);
      break;
    }
    case ActionId::OneWayMirrorObservation: {
      ev.visibility = {actor};
      for (ObjectId o : w.visible_objects(*b.room)) beliefs.set(Chain{actor}, o, Location::room(*b.room));
      break;
    }
    case ActionId::DoubleBluff: {
      const AgentId relay = *b.target;
      const AgentId mark = *b.third;
      ev.visibility = merged({actor, relay}, {mark});
      beliefs.set(Chain{relay}, *b.object, *b.location);
      beliefs.set(Chain{relay, mark}, *b.object, *b.location);
      beliefs.set(Chain{mark}, *b.object, *b.location);
      beliefs.set(Chain{actor, relay}, *b.object, *b.location);
      beliefs.set(Chain{actor, relay, mark}, *b.object, *b.location);
      break;
    }
    case ActionId::FakeMemoryImplant: {
      ev.visibility = {actor};
      beliefs.set(Chain{*b.target}, *b.object, *b.location);
      beliefs.set(Chain{actor, *b.target}, *b.object, *b.location);
      break;
    }
  }
  return ev;
}

Applied apply(ActionId action, const Binding& binding, const WorldState& world, const BeliefState& beliefs,
              std::size_t step_index) {
  Applied out{world, beliefs, {}};
  out.event = apply_in_place(action, binding, out.world, out.beliefs, step_index);
  return out;
}

std::pair<WorldState, BeliefState> apply_event(const WorldState& world, const BeliefState& beliefs,
                                               const StoryEvent& event) {
  Applied out = apply(event.action, event.binding, world, beliefs, event.step_index);
  if (out.event.visibility != event.visibility || out.event.tags != event.tags) {
    throw Error(ErrorKind::IllegalAction, "recorded event at step " + std::to_string(event.step_index) +
                                              " disagrees with its action semantics");
  }
  return {std::move(out.world), std::move(out.beliefs)};
}

std::vector<AgentId> affected_agents(const StoryEvent& event) {
  std::vector<AgentId> out = event.visibility;
  if (event.action == ActionId::FakeMemoryImplant && event.binding.target) {
    out = merged(std::move(out), {*event.binding.target});
  }
  return out;
}

bool moves_object(const StoryEvent& event) noexcept {
  return event.action == ActionId::MoveObject || event.action == ActionId::HideObject ||
         event.action == ActionId::PlaceObject;
}

}  // namespace osct
