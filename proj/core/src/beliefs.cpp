#include "osct/beliefs.hpp"

#include <algorithm>

#include "osct/world.hpp"

namespace osct {

Chain::Chain(std::initializer_list<AgentId> agents) : Chain(std::span<const AgentId>(agents.begin(), agents.size())) {}

Chain::Chain(std::span<const AgentId> agents) {
  if (agents.size() > kMaxBeliefOrder) {
    throw Error(ErrorKind::InvalidArgument, "belief chain longer than 4");
  }
  std::copy(agents.begin(), agents.end(), agents_.begin());
  size_ = agents.size();
}

Chain Chain::extended(AgentId next) const {
  if (size_ >= kMaxBeliefOrder) throw Error(ErrorKind::InvalidArgument, "belief chain longer than 4");
  if (size_ > 0 && agents_[size_ - 1] == next) {
    throw Error(ErrorKind::InvalidArgument, "belief chain repeats an adjacent agent");
  }
  Chain out = *this;
  out.agents_[out.size_++] = next;
  return out;
}

bool Chain::valid() const noexcept {
  if (size_ == 0 || size_ > kMaxBeliefOrder) return false;
  for (std::size_t i = 1; i < size_; ++i) {
    if (agents_[i] == agents_[i - 1]) return false;
  }
  return true;
}

bool operator==(const Chain& a, const Chain& b) noexcept {
  return std::ranges::equal(a.agents(), b.agents());
}

std::strong_ordering operator<=>(const Chain& a, const Chain& b) noexcept {
  // Shorter chains first so layers() iterates by order.
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  for (std::size_t i = 0; i < a.size_; ++i) {
    if (auto c = a.agents_[i] <=> b.agents_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

Chain canonical_chain(std::span<const AgentId> agents) {
  std::vector<AgentId> out;
  for (AgentId a : agents) {
    if (out.empty() || out.back() != a) out.push_back(a);
  }
  return Chain(std::span<const AgentId>(out));
}

std::string describe(const Chain& chain, const WorldState& world) {
  std::string out;
  for (std::size_t i = 0; i < chain.order(); ++i) {
    if (i) out += '>';
    out += world.name(chain[i]);
  }
  return out;
}

namespace {

void require_valid(const Chain& chain) {
  if (chain.empty()) throw Error(ErrorKind::InvalidArgument, "empty belief chain");
  if (!chain.valid()) throw Error(ErrorKind::InvalidArgument, "belief chain repeats an adjacent agent");
}

}  // namespace

BeliefValue BeliefState::query(const Chain& chain, ObjectId object) const {
  require_valid(chain);
  auto layer = layers_.find(chain);
  if (layer == layers_.end()) return std::nullopt;
  auto it = layer->second.find(object);
  if (it == layer->second.end()) return std::nullopt;
  return it->second;
}

void BeliefState::set(const Chain& chain, ObjectId object, Location value) {
  require_valid(chain);
  layers_[chain][object] = value;
}

void BeliefState::forget(const Chain& chain, ObjectId object) {
  require_valid(chain);
  auto layer = layers_.find(chain);
  if (layer == layers_.end()) return;
  layer->second.erase(object);
  if (layer->second.empty()) layers_.erase(layer);
}

void BeliefState::broadcast(std::span<const AgentId> perceivers, ObjectId object, Location value) {
  std::vector<AgentId> group(perceivers.begin(), perceivers.end());
  std::sort(group.begin(), group.end());
  group.erase(std::unique(group.begin(), group.end()), group.end());

  // Depth-first over chains; each prefix is itself a chain that learns the fact.
  std::vector<Chain> frontier;
  for (AgentId a : group) frontier.push_back(Chain{a});
  while (!frontier.empty()) {
    Chain chain = frontier.back();
    frontier.pop_back();
    layers_[chain][object] = value;
    if (chain.order() == kMaxBeliefOrder) continue;
    for (AgentId next : group) {
      if (next != chain.back()) frontier.push_back(chain.extended(next));
    }
  }
}

std::size_t BeliefState::max_order() const noexcept {
  std::size_t best = 0;
  for (const auto& [chain, layer] : layers_) {
    if (!layer.empty()) best = std::max(best, chain.order());
  }
  return best;
}

std::size_t BeliefState::entry_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [chain, layer] : layers_) n += layer.size();
  return n;
}

void BeliefState::for_each(const std::function<void(const Chain&, ObjectId, Location)>& fn) const {
  for (const auto& [chain, layer] : layers_) {
    for (const auto& [object, value] : layer) fn(chain, object, value);
  }
}

BeliefState initial_beliefs(const WorldState& world) {
  BeliefState beliefs;
  for (std::size_t a = 0; a < world.agent_count(); ++a) {
    const AgentId agent = make_id<AgentId>(a);
    for (std::size_t o = 0; o < world.object_count(); ++o) {
      const ObjectId object = make_id<ObjectId>(o);
      if (world.object_room(object) == world.agent_room(agent)) {
        beliefs.set(Chain{agent}, object, world.object_location(object));
      }
    }
  }
  return beliefs;
}

}  // namespace osct
