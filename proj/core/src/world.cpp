#include "osct/world.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace osct {

void to_json(nlohmann::json& j, const WorldSpec& spec) {
  nlohmann::json rooms = nlohmann::json::array();
  for (const auto& r : spec.rooms) {
    rooms.push_back({{"name", r.name}, {"containers", r.containers}});
  }
  j = nlohmann::json{{"agents", spec.agents},
                     {"rooms", rooms},
                     {"objects", spec.objects},
                     {"agent_placements", spec.agent_placements},
                     {"object_placements", spec.object_placements}};
}

void from_json(const nlohmann::json& j, WorldSpec& spec) {
  spec = WorldSpec{};
  j.at("agents").get_to(spec.agents);
  for (const auto& r : j.at("rooms")) {
    RoomSpec room;
    r.at("name").get_to(room.name);
    if (r.contains("containers")) r.at("containers").get_to(room.containers);
    spec.rooms.push_back(std::move(room));
  }
  j.at("objects").get_to(spec.objects);
  j.at("agent_placements").get_to(spec.agent_placements);
  j.at("object_placements").get_to(spec.object_placements);
}

WorldSpec load_world_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open world spec: " + path);
  try {
    return nlohmann::json::parse(in).get<WorldSpec>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "malformed world spec " + path + ": " + e.what());
  }
}

namespace {

template <typename Vec>
auto find_index(const Vec& names, std::string_view name) -> std::optional<std::size_t> {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

const std::string& WorldState::name(Location loc) const {
  return loc.is_room() ? name(loc.as_room()) : name(loc.as_container());
}

std::optional<AgentId> WorldState::find_agent(std::string_view n) const {
  if (auto i = find_index(agent_names_, n)) return make_id<AgentId>(*i);
  return std::nullopt;
}

std::optional<ObjectId> WorldState::find_object(std::string_view n) const {
  if (auto i = find_index(object_names_, n)) return make_id<ObjectId>(*i);
  return std::nullopt;
}

std::optional<RoomId> WorldState::find_room(std::string_view n) const {
  if (auto i = find_index(room_names_, n)) return make_id<RoomId>(*i);
  return std::nullopt;
}

std::optional<Location> WorldState::find_location(std::string_view n) const {
  if (auto i = find_index(room_names_, n)) return Location::room(make_id<RoomId>(*i));
  if (auto i = find_index(container_names_, n)) return Location::container(make_id<ContainerId>(*i));
  return std::nullopt;
}

RoomId WorldState::room_of(Location loc) const {
  if (!valid_location(loc)) throw Error(ErrorKind::InvalidArgument, "location out of range");
  return loc.is_room() ? loc.as_room() : container_room_[loc.index];
}

std::vector<AgentId> WorldState::agents_in(RoomId r) const {
  std::vector<AgentId> out;
  for (std::size_t i = 0; i < agent_location_.size(); ++i) {
    if (agent_location_[i] == r) out.push_back(make_id<AgentId>(i));
  }
  return out;
}

std::vector<ContainerId> WorldState::containers_in(RoomId r) const {
  std::vector<ContainerId> out;
  for (std::size_t i = 0; i < container_room_.size(); ++i) {
    if (container_room_[i] == r) out.push_back(make_id<ContainerId>(i));
  }
  return out;
}

std::vector<ObjectId> WorldState::visible_objects(RoomId r) const {
  std::vector<ObjectId> out;
  const Location here = Location::room(r);
  for (std::size_t i = 0; i < object_location_.size(); ++i) {
    if (object_location_[i] == here) out.push_back(make_id<ObjectId>(i));
  }
  return out;
}

std::vector<ObjectId> WorldState::objects_in(ContainerId c) const {
  std::vector<ObjectId> out;
  const Location here = Location::container(c);
  for (std::size_t i = 0; i < object_location_.size(); ++i) {
    if (object_location_[i] == here) out.push_back(make_id<ObjectId>(i));
  }
  return out;
}

std::vector<Location> WorldState::locations_in(RoomId r) const {
  std::vector<Location> out{Location::room(r)};
  for (ContainerId c : containers_in(r)) out.push_back(Location::container(c));
  return out;
}

std::vector<Location> WorldState::all_locations() const {
  std::vector<Location> out;
  out.reserve(room_names_.size() + container_names_.size());
  for (std::size_t i = 0; i < room_names_.size(); ++i) out.push_back(Location::room(make_id<RoomId>(i)));
  for (std::size_t i = 0; i < container_names_.size(); ++i) {
    out.push_back(Location::container(make_id<ContainerId>(i)));
  }
  return out;
}

bool WorldState::valid_location(Location loc) const noexcept {
  return loc.is_room() ? loc.index < room_names_.size() : loc.index < container_names_.size();
}

void WorldState::move_agent(AgentId a, RoomId r) {
  if (idx(a) >= agent_count() || idx(r) >= room_count()) {
    throw Error(ErrorKind::InvalidArgument, "move_agent: id out of range");
  }
  agent_location_[idx(a)] = r;
}

void WorldState::move_object(ObjectId o, Location loc) {
  if (idx(o) >= object_count() || !valid_location(loc)) {
    throw Error(ErrorKind::InvalidArgument, "move_object: id out of range");
  }
  object_location_[idx(o)] = loc;
}

WorldSpec WorldState::to_spec() const {
  WorldSpec spec;
  spec.agents = agent_names_;
  spec.objects = object_names_;
  for (std::size_t r = 0; r < room_names_.size(); ++r) {
    RoomSpec room{room_names_[r], {}};
    for (ContainerId c : containers_in(make_id<RoomId>(r))) room.containers.push_back(name(c));
    spec.rooms.push_back(std::move(room));
  }
  for (std::size_t a = 0; a < agent_names_.size(); ++a) {
    spec.agent_placements[agent_names_[a]] = name(agent_location_[a]);
  }
  for (std::size_t o = 0; o < object_names_.size(); ++o) {
    spec.object_placements[object_names_[o]] = name(object_location_[o]);
  }
  return spec;
}

WorldState init_world(const WorldSpec& spec) {
  if (spec.agents.size() < WorldState::kMinAgents || spec.rooms.size() < WorldState::kMinRooms ||
      spec.objects.size() < WorldState::kMinObjects) {
    throw Error(ErrorKind::InvalidArgument,
                "world needs at least 2 agents, 2 rooms and 1 object");
  }

  std::set<std::string> seen;
  auto claim = [&seen](const std::string& n, const char* what) {
    if (n.empty()) throw Error(ErrorKind::InvalidArgument, std::string("empty ") + what + " name");
    if (!seen.insert(n).second) throw Error(ErrorKind::InvalidArgument, "duplicate id: " + n);
  };

  WorldState w;
  for (const auto& a : spec.agents) {
    claim(a, "agent");
    w.agent_names_.push_back(a);
  }
  for (const auto& o : spec.objects) {
    claim(o, "object");
    w.object_names_.push_back(o);
  }
  for (std::size_t r = 0; r < spec.rooms.size(); ++r) {
    claim(spec.rooms[r].name, "room");
    w.room_names_.push_back(spec.rooms[r].name);
    for (const auto& c : spec.rooms[r].containers) {
      claim(c, "container");
      w.container_names_.push_back(c);
      w.container_room_.push_back(make_id<RoomId>(r));
    }
  }

  for (const auto& [agent, room] : spec.agent_placements) {
    if (!w.find_agent(agent)) throw Error(ErrorKind::InvalidArgument, "placement for unknown agent: " + agent);
    if (!w.find_room(room)) throw Error(ErrorKind::InvalidArgument, "agent placed in unknown room: " + room);
  }
  for (const auto& [object, loc] : spec.object_placements) {
    if (!w.find_object(object)) throw Error(ErrorKind::InvalidArgument, "placement for unknown object: " + object);
    if (!w.find_location(loc)) throw Error(ErrorKind::InvalidArgument, "object placed at unknown location: " + loc);
  }

  for (const auto& a : w.agent_names_) {
    auto it = spec.agent_placements.find(a);
    if (it == spec.agent_placements.end()) throw Error(ErrorKind::InvalidArgument, "agent without placement: " + a);
    w.agent_location_.push_back(*w.find_room(it->second));
  }
  for (const auto& o : w.object_names_) {
    auto it = spec.object_placements.find(o);
    if (it == spec.object_placements.end()) throw Error(ErrorKind::InvalidArgument, "object without placement: " + o);
    w.object_location_.push_back(*w.find_location(it->second));
  }
  return w;
}

}  // namespace osct
