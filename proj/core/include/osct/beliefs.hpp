#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "osct/ids.hpp"

namespace osct {

class WorldState;

inline constexpr std::size_t kMaxBeliefOrder = 4;

// An attribution chain [i, j, ..., n]: "i thinks j thinks ... n believes".
// Length is the belief order. Adjacent agents must differ.
class Chain {
 public:
  Chain() = default;
  Chain(std::initializer_list<AgentId> agents);
  explicit Chain(std::span<const AgentId> agents);

  std::size_t order() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  AgentId operator[](std::size_t i) const { return agents_.at(i); }
  AgentId front() const { return agents_.at(0); }
  AgentId back() const { return agents_.at(size_ - 1); }
  std::span<const AgentId> agents() const noexcept { return {agents_.data(), size_}; }

  // Throws Error(InvalidArgument) on a full chain or a repeated neighbour.
  Chain extended(AgentId next) const;

  // Length in 1..4 with no repeated neighbours.
  bool valid() const noexcept;

  friend bool operator==(const Chain& a, const Chain& b) noexcept;
  friend std::strong_ordering operator<=>(const Chain& a, const Chain& b) noexcept;

 private:
  std::array<AgentId, kMaxBeliefOrder> agents_{};
  std::size_t size_ = 0;
};

// Collapses repeated neighbours (i, i) -> (i). An agent's model of its own
// belief is its belief.
Chain canonical_chain(std::span<const AgentId> agents);

std::string describe(const Chain& chain, const WorldState& world);

// Nested belief store. Each valid chain owns an attributed order-1 layer
// mapping objects to believed locations; absent entries are Unknown.
class BeliefState {
 public:
  using Layer = std::map<ObjectId, Location>;

  // Throws Error(InvalidArgument) on an invalid chain. Never mutates.
  BeliefValue query(const Chain& chain, ObjectId object) const;
  BeliefValue query(AgentId agent, ObjectId object) const { return query(Chain{agent}, object); }

  void set(const Chain& chain, ObjectId object, Location value);
  void forget(const Chain& chain, ObjectId object);

  // Shared perception: every chain drawn from `perceivers` (length 1..4,
  // no repeated neighbours) learns object -> value.
  void broadcast(std::span<const AgentId> perceivers, ObjectId object, Location value);

  // Deepest chain holding a known value; 0 when nothing is known.
  std::size_t max_order() const noexcept;
  std::size_t entry_count() const noexcept;

  const std::map<Chain, Layer>& layers() const noexcept { return layers_; }

  // Visits every known (chain, object, value) in chain order.
  void for_each(const std::function<void(const Chain&, ObjectId, Location)>& fn) const;

  bool operator==(const BeliefState&) const = default;

 private:
  std::map<Chain, Layer> layers_;
};

// Agents know where every object in their own room is, containers included.
// Only order-1 beliefs are seeded.
BeliefState initial_beliefs(const WorldState& world);

}  // namespace osct
