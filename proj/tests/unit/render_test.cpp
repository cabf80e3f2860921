#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "osct/render.hpp"

namespace osct {
namespace {

std::vector<std::string> event_lines(const std::string& text) {
  const auto body = text.substr(text.find("\n\n") + 2);
  std::vector<std::string> lines;
  std::istringstream in(body);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

void expect_round_trip(const StoryTrace& t) {
  const auto text = render_template(t);
  const auto parsed = parse_rendered(text, t.initial_world);
  ASSERT_EQ(parsed.size(), t.events.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].action, t.events[i].action) << "event " << i;
    EXPECT_EQ(parsed[i].binding, t.events[i].binding) << "event " << i;
  }
}

TEST(Render, SallyAnneSentences) {
  const auto t = testing::sally_anne();
  const auto lines = event_lines(render_template(t));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "Sally left the room and went to the hallway.");
  EXPECT_EQ(lines[1], "Anne placed the ball in the box.");
  EXPECT_EQ(lines[2], "Sally entered the room.");
  EXPECT_EQ(lines[3], "Anne left the room and went to the hallway.");
}

TEST(Render, UnnoticedEventsNameTheMissedAgents) {
  const auto t = testing::double_bluff_script();
  const auto lines = event_lines(render_template(t));
  ASSERT_EQ(lines.size(), t.events.size());
  // The peek is private; Bob and Carol share the hall.
  EXPECT_EQ(lines[0], "Alice peeked into the chest without Bob and Carol noticing.");
  EXPECT_EQ(lines[1],
            "Alice double-bluffed Bob, claiming the ring is in the garden so that Carol would hear it too.");
}

TEST(Render, Deterministic) {
  const auto t = testing::random_story(5);
  EXPECT_EQ(render_template(t), render_template(t));
}

TEST(Render, RoundTripsFixtures) {
  expect_round_trip(testing::sally_anne());
  expect_round_trip(testing::lie_script());
  expect_round_trip(testing::double_bluff_script());
}

TEST(Render, RoundTripsRandomStories) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    SCOPED_TRACE(seed);
    expect_round_trip(testing::random_story(seed, 15, 4));
  }
}

TEST(Render, ParserRejectsForeignLines) {
  const auto t = testing::sally_anne();
  auto text = render_template(t) + "\nThe moon rose over the hills.";
  try {
    parse_rendered(text, t.initial_world);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

}  // namespace
}  // namespace osct
