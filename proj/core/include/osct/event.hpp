#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "osct/ids.hpp"

namespace osct {

inline constexpr std::size_t kActionCount = 15;

enum class ActionId : std::uint8_t {
  EnterRoom = 0,
  LeaveRoom,
  MoveObject,
  HideObject,
  PlaceObject,
  PeekIntoContainer,
  ObserveRoom,
  TellLocationTruthfully,
  AskLocation,
  AnnouncePublicly,
  WitnessSilently,
  LieAboutLocation,
  OneWayMirrorObservation,
  DoubleBluff,
  FakeMemoryImplant,
};

constexpr std::size_t idx(ActionId a) noexcept { return static_cast<std::size_t>(a); }
std::optional<ActionId> action_from_index(int index) noexcept;

enum class Tag : std::uint8_t {
  Physical = 1u << 0,
  Communication = 1u << 1,
  Deceptive = 1u << 2,
  Observation = 1u << 3,
};

class TagSet {
 public:
  constexpr TagSet() = default;
  constexpr TagSet(std::initializer_list<Tag> tags) {
    for (Tag t : tags) bits_ |= static_cast<std::uint8_t>(t);
  }
  constexpr bool has(Tag t) const noexcept { return (bits_ & static_cast<std::uint8_t>(t)) != 0; }
  constexpr std::uint8_t bits() const noexcept { return bits_; }
  friend constexpr bool operator==(TagSet, TagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

std::string_view tag_name(Tag t) noexcept;
inline constexpr std::array<Tag, 4> kAllTags{Tag::Physical, Tag::Communication, Tag::Deceptive, Tag::Observation};

// Role-tagged arguments. Which roles are filled depends on the action
// (see ActionSpec::roles).
struct Binding {
  AgentId actor{};
  std::optional<AgentId> target;  // hearer, watched party, intermediary, implant target
  std::optional<AgentId> third;   // final target of a double bluff
  std::optional<ObjectId> object;
  std::optional<Location> location;  // destination, container, or claimed false location
  std::optional<RoomId> room;        // destination or watched room

  friend auto operator<=>(const Binding&, const Binding&) = default;
};

struct StoryEvent {
  std::size_t step_index = 0;
  ActionId action{};
  Binding binding;
  std::vector<AgentId> visibility;  // sorted
  TagSet tags;

  AgentId actor() const noexcept { return binding.actor; }
  bool operator==(const StoryEvent&) const = default;
};

}  // namespace osct
