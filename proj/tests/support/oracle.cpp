#include "oracle.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace osct::testing {

namespace {

using Chain_ = std::vector<std::string>;

bool is_room(const OracleState& s, const std::string& loc) {
  return std::find(s.rooms.begin(), s.rooms.end(), loc) != s.rooms.end();
}

std::string room_of(const OracleState& s, const std::string& loc) {
  return is_room(s, loc) ? loc : s.container_room.at(loc);
}

std::vector<std::string> occupants(const OracleState& s, const std::string& room) {
  std::vector<std::string> out;
  for (const auto& a : s.agents) {
    if (s.agent_room.at(a) == room) out.push_back(a);
  }
  return out;
}

std::vector<std::string> floor_objects(const OracleState& s, const std::string& room) {
  std::vector<std::string> out;
  for (const auto& [o, at] : s.object_at) {
    if (at == room) out.push_back(o);
  }
  return out;
}

const std::string* belief(const OracleState& s, const Chain_& chain, const std::string& object) {
  const auto it = s.beliefs.find({chain, object});
  return it == s.beliefs.end() ? nullptr : &it->second;
}

void require(bool ok, const std::string& why) {
  if (!ok) throw std::logic_error("oracle: illegal event: " + why);
}

// Every chain of length 1..4 over all agents with no agent repeated back to
// back, kept when each member perceived the event.
void learn(OracleState& s, const std::set<std::string>& perceivers, const std::string& object,
           const std::string& value) {
  std::vector<Chain_> chains;
  for (const auto& a : s.agents) chains.push_back({a});
  for (std::size_t len = 2; len <= 4; ++len) {
    std::vector<Chain_> longer;
    for (const auto& c : chains) {
      if (c.size() != len - 1) continue;
      for (const auto& a : s.agents) {
        if (a == c.back()) continue;
        auto next = c;
        next.push_back(a);
        longer.push_back(next);
      }
    }
    chains.insert(chains.end(), longer.begin(), longer.end());
  }
  for (const auto& c : chains) {
    const bool all_saw = std::all_of(c.begin(), c.end(), [&](const std::string& a) { return perceivers.contains(a); });
    if (all_saw) s.beliefs[{c, object}] = value;
  }
}

void check_false_claim(const OracleState& s, const OracleEvent& e) {
  const auto* own = belief(s, {e.actor}, e.object);
  require(own != nullptr, "liar has no belief");
  require(e.location != s.object_at.at(e.object), "claim is true");
  require(e.location != *own, "claim equals own belief");
}

void check_co_present(const OracleState& s, const OracleEvent& e) {
  require(e.target != e.actor, "target is actor");
  require(s.agent_room.at(e.target) == s.agent_room.at(e.actor), "target absent");
}

}  // namespace

OracleState oracle_initial(const WorldSpec& spec) {
  OracleState s;
  s.agents = spec.agents;
  for (const auto& r : spec.rooms) {
    s.rooms.push_back(r.name);
    for (const auto& c : r.containers) s.container_room[c] = r.name;
  }
  s.agent_room = spec.agent_placements;
  s.object_at = spec.object_placements;
  for (const auto& a : s.agents) {
    for (const auto& [o, at] : s.object_at) {
      if (room_of(s, at) == s.agent_room.at(a)) s.beliefs[{{a}, o}] = at;
    }
  }
  return s;
}

void oracle_apply(OracleState& s, const OracleEvent& e) {
  const std::string here = s.agent_room.at(e.actor);
  const auto company = occupants(s, here);
  const auto& act = e.action;

  if (act == "enter_room") {
    require(e.room != here, "already there");
    s.agent_room[e.actor] = e.room;
    const auto seen = occupants(s, e.room);
    const std::set<std::string> p(seen.begin(), seen.end());
    for (const auto& o : floor_objects(s, e.room)) learn(s, p, o, e.room);
  } else if (act == "leave_room") {
    require(e.room != here, "already there");
    s.agent_room[e.actor] = e.room;
  } else if (act == "move_object") {
    require(room_of(s, s.object_at.at(e.object)) == here, "object out of reach");
    require(is_room(s, e.location) && e.location != here, "bad destination");
    std::set<std::string> p(company.begin(), company.end());
    for (const auto& a : occupants(s, e.location)) p.insert(a);
    s.object_at[e.object] = e.location;
    learn(s, p, e.object, e.location);
  } else if (act == "hide_object") {
    require(room_of(s, s.object_at.at(e.object)) == here, "object out of reach");
    require(!is_room(s, e.location) && s.container_room.at(e.location) == here, "bad hiding place");
    require(e.location != s.object_at.at(e.object), "no-op");
    s.object_at[e.object] = e.location;
    learn(s, {e.actor}, e.object, e.location);
  } else if (act == "place_object") {
    require(room_of(s, s.object_at.at(e.object)) == here, "object out of reach");
    require(room_of(s, e.location) == here, "bad destination");
    require(e.location != s.object_at.at(e.object), "no-op");
    s.object_at[e.object] = e.location;
    learn(s, {company.begin(), company.end()}, e.object, e.location);
  } else if (act == "peek_into_container") {
    require(!is_room(s, e.location) && s.container_room.at(e.location) == here, "bad container");
    std::vector<std::string> inside;
    for (const auto& [o, at] : s.object_at) {
      if (at == e.location) inside.push_back(o);
    }
    require(!inside.empty(), "empty container");
    for (const auto& o : inside) learn(s, {e.actor}, o, e.location);
  } else if (act == "observe_room") {
    const auto visible = floor_objects(s, here);
    require(!visible.empty(), "nothing visible");
    for (const auto& o : visible) learn(s, {company.begin(), company.end()}, o, here);
  } else if (act == "tell_location_truthfully" || act == "ask_location") {
    check_co_present(s, e);
    const std::string& knower = act == "ask_location" ? e.target : e.actor;
    const auto* b = belief(s, {knower}, e.object);
    require(b && *b == s.object_at.at(e.object), "speaker does not know the truth");
    learn(s, {e.actor, e.target}, e.object, s.object_at.at(e.object));
  } else if (act == "announce_publicly") {
    require(company.size() > 1, "alone");
    const auto* b = belief(s, {e.actor}, e.object);
    require(b && *b == s.object_at.at(e.object), "speaker does not know the truth");
    learn(s, {company.begin(), company.end()}, e.object, s.object_at.at(e.object));
  } else if (act == "witness_silently") {
    require(company.size() > 1, "alone");
    require(room_of(s, s.object_at.at(e.object)) == here, "object elsewhere");
    learn(s, {e.actor}, e.object, s.object_at.at(e.object));
  } else if (act == "lie_about_location" || act == "fake_memory_implant") {
    check_co_present(s, e);
    check_false_claim(s, e);
    s.beliefs[{{e.target}, e.object}] = e.location;
    s.beliefs[{{e.actor, e.target}, e.object}] = e.location;
  } else if (act == "one_way_mirror_observation") {
    require(e.room != here, "same room");
    const auto visible = floor_objects(s, e.room);
    require(!visible.empty(), "nothing visible");
    for (const auto& o : visible) s.beliefs[{{e.actor}, o}] = e.room;
  } else if (act == "double_bluff") {
    check_co_present(s, e);
    require(e.third != e.actor && e.third != e.target, "third not distinct");
    check_false_claim(s, e);
    for (const Chain_& c : {Chain_{e.target}, Chain_{e.target, e.third}, Chain_{e.third}, Chain_{e.actor, e.target},
                            Chain_{e.actor, e.target, e.third}}) {
      s.beliefs[{c, e.object}] = e.location;
    }
  } else {
    throw std::logic_error("oracle: unknown action " + act);
  }
}

OracleState replay_oracle(const WorldSpec& spec, const std::vector<OracleEvent>& events) {
  OracleState s = oracle_initial(spec);
  for (const auto& e : events) oracle_apply(s, e);
  return s;
}

OracleEvent to_oracle_event(const StoryEvent& event, const WorldState& world) {
  const auto& b = event.binding;
  OracleEvent e;
  e.action = std::string(action_name(event.action));
  e.actor = world.name(b.actor);
  if (b.target) e.target = world.name(*b.target);
  if (b.third) e.third = world.name(*b.third);
  if (b.object) e.object = world.name(*b.object);
  if (b.location) e.location = world.name(*b.location);
  if (b.room) e.room = world.name(*b.room);
  return e;
}

std::vector<std::string> diff_against(const OracleState& oracle, const WorldState& world, const BeliefState& beliefs) {
  std::vector<std::string> out;
  for (std::size_t a = 0; a < world.agent_count(); ++a) {
    const auto& name = world.name(make_id<AgentId>(a));
    const auto& room = world.name(world.agent_room(make_id<AgentId>(a)));
    if (oracle.agent_room.at(name) != room) out.push_back("agent " + name + " in " + room);
  }
  for (std::size_t o = 0; o < world.object_count(); ++o) {
    const auto& name = world.name(make_id<ObjectId>(o));
    const auto& at = world.name(world.object_location(make_id<ObjectId>(o)));
    if (oracle.object_at.at(name) != at) out.push_back("object " + name + " at " + at);
  }
  std::map<std::pair<std::vector<std::string>, std::string>, std::string> tracked;
  beliefs.for_each([&](const Chain& chain, ObjectId object, Location value) {
    std::vector<std::string> names;
    for (AgentId a : chain.agents()) names.push_back(world.name(a));
    tracked[{names, world.name(object)}] = world.name(value);
  });
  auto key_text = [](const auto& key) {
    std::string s;
    for (const auto& a : key.first) s += a + ">";
    return s + key.second;
  };
  for (const auto& [key, value] : oracle.beliefs) {
    const auto it = tracked.find(key);
    if (it == tracked.end()) {
      out.push_back("missing " + key_text(key) + " = " + value);
    } else if (it->second != value) {
      out.push_back("differs " + key_text(key) + ": tracker " + it->second + ", oracle " + value);
    }
  }
  for (const auto& [key, value] : tracked) {
    if (!oracle.beliefs.contains(key)) out.push_back("extra " + key_text(key) + " = " + value);
  }
  return out;
}

}  // namespace osct::testing
