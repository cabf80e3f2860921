#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "osct/world.hpp"

namespace osct {
namespace {

WorldSpec base_spec() { return testing::sally_anne_world(); }

TEST(World, InitIndexesNamesAndPlacements) {
  const WorldState w = init_world(base_spec());
  EXPECT_EQ(w.agent_count(), 2u);
  EXPECT_EQ(w.room_count(), 2u);
  EXPECT_EQ(w.container_count(), 2u);
  const auto sally = *w.find_agent("Sally");
  const auto ball = *w.find_object("ball");
  EXPECT_EQ(w.name(w.agent_room(sally)), "room");
  EXPECT_EQ(w.name(w.object_location(ball)), "basket");
  EXPECT_EQ(w.name(w.object_room(ball)), "room");
}

TEST(World, ContainedObjectsAreNotVisibleOnTheFloor) {
  const WorldState w = init_world(base_spec());
  EXPECT_TRUE(w.visible_objects(*w.find_room("room")).empty());
  const auto basket = w.find_location("basket")->as_container();
  EXPECT_EQ(w.objects_in(basket).size(), 1u);
}

TEST(World, RejectsDuplicateNamesAcrossKinds) {
  auto spec = base_spec();
  spec.objects.push_back("Sally");
  spec.object_placements["Sally"] = "room";
  try {
    init_world(spec);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(World, RejectsUnknownReferencesAndMissingPlacements) {
  auto unknown_room = base_spec();
  unknown_room.agent_placements["Anne"] = "cellar";
  EXPECT_THROW(init_world(unknown_room), Error);

  auto missing = base_spec();
  missing.object_placements.clear();
  EXPECT_THROW(init_world(missing), Error);

  auto too_few = base_spec();
  too_few.agents = {"Sally"};
  too_few.agent_placements.erase("Anne");
  EXPECT_THROW(init_world(too_few), Error);
}

TEST(World, SpecJsonRoundTrip) {
  const auto spec = base_spec();
  const nlohmann::json j = spec;
  EXPECT_EQ(j.get<WorldSpec>(), spec);
  EXPECT_EQ(init_world(spec).to_spec(), spec);
}

TEST(World, LoadMissingFileIsIoError) {
  try {
    load_world_spec("/nonexistent/world.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(World, MovesUpdateState) {
  WorldState w = init_world(base_spec());
  const auto sally = *w.find_agent("Sally");
  w.move_agent(sally, *w.find_room("hallway"));
  EXPECT_EQ(w.agents_in(*w.find_room("room")).size(), 1u);
  const auto ball = *w.find_object("ball");
  w.move_object(ball, *w.find_location("hallway"));
  EXPECT_EQ(w.visible_objects(*w.find_room("hallway")), std::vector<ObjectId>{ball});
}

}  // namespace
}  // namespace osct
