#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/ids.hpp"

namespace osct {

// Name-based description of a starting world. This is the on-disk form
// (see docs/formats.md); WorldState is the indexed, validated form.
struct RoomSpec {
  std::string name;
  std::vector<std::string> containers;

  bool operator==(const RoomSpec&) const = default;
};

struct WorldSpec {
  std::vector<std::string> agents;
  std::vector<RoomSpec> rooms;
  std::vector<std::string> objects;
  std::map<std::string, std::string> agent_placements;   // agent -> room
  std::map<std::string, std::string> object_placements;  // object -> room or container

  bool operator==(const WorldSpec&) const = default;
};

void to_json(nlohmann::json& j, const WorldSpec& spec);
void from_json(const nlohmann::json& j, WorldSpec& spec);

WorldSpec load_world_spec(const std::string& path);

class WorldState {
 public:
  static constexpr std::size_t kMinAgents = 2;
  static constexpr std::size_t kMinRooms = 2;
  static constexpr std::size_t kMinObjects = 1;

  std::size_t agent_count() const noexcept { return agent_names_.size(); }
  std::size_t room_count() const noexcept { return room_names_.size(); }
  std::size_t container_count() const noexcept { return container_names_.size(); }
  std::size_t object_count() const noexcept { return object_names_.size(); }

  const std::string& name(AgentId a) const { return agent_names_.at(idx(a)); }
  const std::string& name(RoomId r) const { return room_names_.at(idx(r)); }
  const std::string& name(ContainerId c) const { return container_names_.at(idx(c)); }
  const std::string& name(ObjectId o) const { return object_names_.at(idx(o)); }
  const std::string& name(Location loc) const;

  std::optional<AgentId> find_agent(std::string_view name) const;
  std::optional<ObjectId> find_object(std::string_view name) const;
  std::optional<RoomId> find_room(std::string_view name) const;
  std::optional<Location> find_location(std::string_view name) const;

  RoomId agent_room(AgentId a) const { return agent_location_.at(idx(a)); }
  Location object_location(ObjectId o) const { return object_location_.at(idx(o)); }
  RoomId container_room(ContainerId c) const { return container_room_.at(idx(c)); }
  RoomId room_of(Location loc) const;
  RoomId object_room(ObjectId o) const { return room_of(object_location(o)); }

  // Sorted by id.
  std::vector<AgentId> agents_in(RoomId r) const;
  std::vector<ContainerId> containers_in(RoomId r) const;
  // Objects lying openly in the room (not inside a container).
  std::vector<ObjectId> visible_objects(RoomId r) const;
  std::vector<ObjectId> objects_in(ContainerId c) const;
  // Every location belonging to a room: the room itself, then its containers.
  std::vector<Location> locations_in(RoomId r) const;
  // Rooms first, then containers.
  std::vector<Location> all_locations() const;

  bool valid_location(Location loc) const noexcept;

  void move_agent(AgentId a, RoomId r);
  void move_object(ObjectId o, Location loc);

  // Snapshot of the current placements in name form.
  WorldSpec to_spec() const;

  bool operator==(const WorldState&) const = default;

 private:
  friend WorldState init_world(const WorldSpec& spec);

  std::vector<std::string> agent_names_;
  std::vector<std::string> room_names_;
  std::vector<std::string> container_names_;
  std::vector<std::string> object_names_;
  std::vector<RoomId> container_room_;
  std::vector<RoomId> agent_location_;
  std::vector<Location> object_location_;
};

// Validates the spec and builds the indexed world. Throws Error on duplicate
// names, dangling placements, missing placements or too few entities.
WorldState init_world(const WorldSpec& spec);

}  // namespace osct
