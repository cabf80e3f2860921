#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace osct {

enum class AgentId : std::uint16_t {};
enum class RoomId : std::uint16_t {};
enum class ObjectId : std::uint16_t {};
enum class ContainerId : std::uint16_t {};

template <typename Id>
constexpr std::size_t idx(Id id) noexcept {
  return static_cast<std::size_t>(id);
}

template <typename Id>
constexpr Id make_id(std::size_t i) noexcept {
  return static_cast<Id>(static_cast<std::uint16_t>(i));
}

// Where an object can be: directly in a room (visible to its occupants) or
// inside a container (hidden until someone looks inside).
struct Location {
  enum class Kind : std::uint8_t { Room, Container };

  Kind kind = Kind::Room;
  std::uint16_t index = 0;

  static constexpr Location room(RoomId r) noexcept { return {Kind::Room, static_cast<std::uint16_t>(r)}; }
  static constexpr Location container(ContainerId c) noexcept {
    return {Kind::Container, static_cast<std::uint16_t>(c)};
  }

  constexpr bool is_room() const noexcept { return kind == Kind::Room; }
  constexpr bool is_container() const noexcept { return kind == Kind::Container; }
  constexpr RoomId as_room() const noexcept { return static_cast<RoomId>(index); }
  constexpr ContainerId as_container() const noexcept { return static_cast<ContainerId>(index); }

  friend constexpr auto operator<=>(const Location&, const Location&) = default;
};

// std::nullopt is the explicit Unknown value.
using BeliefValue = std::optional<Location>;

enum class ErrorKind {
  InvalidArgument,
  IllegalAction,
  Parse,
  Io,
  Config,
  MissingCheckpoint,
  State,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace osct
