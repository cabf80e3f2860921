#include <gtest/gtest.h>

#include <filesystem>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "osct/trace.hpp"

namespace osct {
namespace {

TEST(Trace, JsonRoundTripOnRandomStories) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = testing::random_story(seed);
    const auto j = trace_to_json(t);
    EXPECT_EQ(j["schema"], kTraceSchema);
    EXPECT_EQ(trace_from_json(j), t);
    EXPECT_EQ(trace_from_json(nlohmann::json::parse(j.dump())), t);
  }
}

TEST(Trace, LoadRejectsInconsistentFinalState) {
  auto j = trace_to_json(testing::sally_anne());
  j["final"]["world"]["object_placements"]["ball"] = "basket";
  EXPECT_THROW(trace_from_json(j), Error);
}

TEST(Trace, UnknownActionIsParseError) {
  auto j = trace_to_json(testing::sally_anne());
  j["events"][0]["action"] = "teleport";
  try {
    trace_from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(Trace, SaveAndLoadFile) {
  const auto path = std::filesystem::temp_directory_path() / "osct_trace_test.json";
  const auto t = testing::double_bluff_script();
  save_trace(t, path.string());
  EXPECT_EQ(load_trace(path.string()), t);
  std::filesystem::remove(path);
}

TEST(Trace, BeliefsJsonNamesChains) {
  const auto t = testing::lie_script();
  const auto j = beliefs_to_json(t.final_beliefs, t.final_world);
  bool found = false;
  for (const auto& entry : j) {
    if (entry["chain"] == nlohmann::json{"Alice", "Bob"} && entry["object"] == "ball") {
      EXPECT_EQ(entry["value"], "basket");
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

}  // namespace
}  // namespace osct
