#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "osct/beliefs.hpp"

namespace osct {
namespace {

constexpr AgentId A = make_id<AgentId>(0);
constexpr AgentId B = make_id<AgentId>(1);
constexpr AgentId C = make_id<AgentId>(2);
constexpr ObjectId ball = make_id<ObjectId>(0);

TEST(Chain, LengthAndNeighbourRules) {
  EXPECT_TRUE((Chain{A, B, A, B}).valid());
  EXPECT_FALSE((Chain{A, A}).valid());
  EXPECT_THROW((Chain{A, B, A, B, A}), Error);
  EXPECT_THROW((Chain{A}).extended(A), Error);
  EXPECT_THROW((Chain{A, B, A, B}).extended(C), Error);
  EXPECT_EQ((Chain{A}).extended(B), (Chain{A, B}));
}

TEST(Chain, CanonicalCollapsesRepeatedNeighbours) {
  const std::vector<AgentId> raw{A, A, B, B, A};
  EXPECT_EQ(canonical_chain(raw), (Chain{A, B, A}));
}

TEST(Chain, OrdersByLengthThenAgents) {
  EXPECT_LT((Chain{B}), (Chain{A, B}));
  EXPECT_LT((Chain{A, B}), (Chain{B, A}));
}

TEST(Beliefs, UnknownIsAbsent) {
  BeliefState s;
  EXPECT_EQ(s.query(A, ball), std::nullopt);
  s.set(Chain{A, B}, ball, Location::room(make_id<RoomId>(1)));
  EXPECT_EQ(s.query(A, ball), std::nullopt);
  EXPECT_EQ(s.query(Chain{A, B}, ball), Location::room(make_id<RoomId>(1)));
  s.forget(Chain{A, B}, ball);
  EXPECT_EQ(s.entry_count(), 0u);
}

TEST(Beliefs, QueryRejectsInvalidChain) {
  BeliefState s;
  EXPECT_THROW(s.query(Chain{A, A}, ball), Error);
  EXPECT_THROW(s.query(Chain{}, ball), Error);
}

// Number of chains of length 1..4 with distinct neighbours over n agents.
std::size_t chain_count(std::size_t n) {
  std::size_t total = 0, layer = n;
  for (int k = 1; k <= 4; ++k) {
    total += layer;
    layer *= n - 1;
  }
  return total;
}

TEST(Beliefs, BroadcastReachesEveryChainOfPerceivers) {
  for (std::size_t n : {1u, 2u, 3u, 4u}) {
    BeliefState s;
    std::vector<AgentId> group;
    for (std::size_t i = 0; i < n; ++i) group.push_back(make_id<AgentId>(i));
    s.broadcast(group, ball, Location::container(make_id<ContainerId>(0)));
    EXPECT_EQ(s.entry_count(), chain_count(n)) << n << " perceivers";
    EXPECT_EQ(s.max_order(), n == 1 ? 1u : 4u);
  }
}

TEST(Beliefs, BroadcastLeavesOutsidersAlone) {
  BeliefState s;
  const std::vector<AgentId> group{A, B};
  s.broadcast(group, ball, Location::room(make_id<RoomId>(0)));
  s.for_each([](const Chain& chain, ObjectId, Location) {
    for (AgentId a : chain.agents()) EXPECT_NE(a, C);
  });
}

TEST(Beliefs, InitialBeliefsCoverCoLocatedObjectsOnly) {
  const WorldState w = init_world(testing::sally_anne_world());
  const BeliefState s = initial_beliefs(w);
  EXPECT_EQ(s.max_order(), 1u);
  EXPECT_EQ(s.entry_count(), 2u);  // both agents see the basket
  EXPECT_EQ(s.query(*w.find_agent("Sally"), *w.find_object("ball")), w.find_location("basket"));
}

}  // namespace
}  // namespace osct
