#include <gtest/gtest.h>

#include <map>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "osct/qa.hpp"

namespace osct {
namespace {

void expect_sound(const StoryTrace& t) {
  const auto items = generate_questions(t);
  std::map<int, std::size_t> per_order;
  for (const auto& q : items) {
    ++per_order[q.tom_order];
    ASSERT_EQ(static_cast<std::size_t>(q.tom_order), q.agent_chain.size());
    const Chain c{std::span<const AgentId>(q.agent_chain)};
    ASSERT_TRUE(c.valid());
    EXPECT_EQ(q.answer, t.final_beliefs.query(c, q.object));
    ASSERT_TRUE(q.answer.has_value());
    EXPECT_EQ(q.answer_is_ground_truth_divergent, *q.answer != t.final_world.object_location(q.object));
    EXPECT_EQ(q.question_text, question_text(c, q.object, t.final_world));
  }
  for (const auto& [order, n] : per_order) {
    EXPECT_GE(order, 1);
    EXPECT_LE(order, 4);
    EXPECT_LE(n, kMaxQuestionsPerOrder);
  }
}

TEST(Questions, SallyAnneAsksAboutSallysFalseBelief) {
  const auto t = testing::sally_anne();
  const auto items = generate_questions(t);
  const auto& w = t.final_world;
  const auto sally = *w.find_agent("Sally");
  bool found = false;
  for (const auto& q : items) {
    if (q.tom_order == 1 && q.agent_chain == std::vector<AgentId>{sally}) {
      found = true;
      EXPECT_EQ(q.question_text, "Where does Sally think the ball is?");
      EXPECT_EQ(q.answer, w.find_location("basket"));
      EXPECT_TRUE(q.answer_is_ground_truth_divergent);
    }
  }
  EXPECT_TRUE(found);
  // Divergent questions lead their order.
  ASSERT_FALSE(items.empty());
  EXPECT_TRUE(items.front().answer_is_ground_truth_divergent);
  expect_sound(t);
}

TEST(Questions, HigherOrderPhrasing) {
  const auto t = testing::double_bluff_script();
  const auto& w = t.final_world;
  const Chain abc{*w.find_agent("Alice"), *w.find_agent("Bob"), *w.find_agent("Carol")};
  EXPECT_EQ(question_text(abc, *w.find_object("ring"), w),
            "Where does Alice think Bob believes Carol believes the ring is?");
  const auto items = generate_questions(t);
  EXPECT_TRUE(std::any_of(items.begin(), items.end(), [](const QAItem& q) { return q.tom_order == 3; }));
  expect_sound(t);
}

TEST(Questions, SoundOnRandomStories) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    SCOPED_TRACE(seed);
    expect_sound(testing::random_story(seed));
  }
}

TEST(Questions, Deterministic) {
  const auto t = testing::random_story(42);
  EXPECT_EQ(generate_questions(t), generate_questions(t));
}

TEST(Questions, JsonRoundTrip) {
  const auto t = testing::double_bluff_script();
  for (const auto& q : generate_questions(t)) {
    const auto j = qa_to_json(q, t.final_world);
    EXPECT_EQ(qa_from_json(j, t.final_world), q);
  }
  EXPECT_THROW(qa_from_json(nlohmann::json::object(), t.final_world), Error);
}

}  // namespace
}  // namespace osct
