#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "osct/dataset.hpp"

namespace osct {
namespace {

// Nearest rank: the ceil(p * n)-th smallest value.
double nearest_rank(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  return v[std::max<std::size_t>(rank, 1) - 1];
}

TEST(Tiers, UniformHundredSplitsEvenly) {
  std::vector<double> h;
  for (int i = 0; i < 100; ++i) h.push_back((i * 37 % 100) / 100.0);
  const auto t = tier_thresholds(h);
  std::array<int, 5> counts{};
  for (double x : h) ++counts[static_cast<std::size_t>(tier_of(x, t) - 1)];
  for (int c : counts) EXPECT_EQ(c, 20);
  EXPECT_DOUBLE_EQ(t.values[0], 0.19);
  EXPECT_DOUBLE_EQ(t.values[3], 0.79);
}

TEST(Tiers, AllEqualGoesToTierOne) {
  const std::vector<double> h(50, 0.42);
  const auto t = tier_thresholds(h);
  for (double x : h) EXPECT_EQ(tier_of(x, t), 1);
}

TEST(Tiers, AgreesWithNearestRankOracle) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> len(5, 300);
  std::uniform_int_distribution<int> grid(0, 40);  // coarse values force ties
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> h(static_cast<std::size_t>(len(rng)));
    for (auto& x : h) x = grid(rng) / 40.0;
    const auto t = tier_thresholds(h);
    const std::array<double, 4> expected{nearest_rank(h, 0.2), nearest_rank(h, 0.4), nearest_rank(h, 0.6),
                                         nearest_rank(h, 0.8)};
    EXPECT_EQ(t.values, expected);
    for (double x : h) {
      const int tier = 1 + static_cast<int>(std::count_if(expected.begin(), expected.end(),
                                                          [x](double p) { return p < x; }));
      EXPECT_EQ(tier_of(x, t), tier);
    }
  }
}

TEST(Tiers, TooFewValuesRejected) {
  EXPECT_THROW(tier_thresholds({0.1, 0.2, 0.3, 0.4}), Error);
}

DatasetOptions small_options(std::size_t count, std::uint64_t seed, int jobs = 1) {
  DatasetOptions o;
  o.count = count;
  o.seed = seed;
  o.jobs = jobs;
  return o;
}

TEST(Corpus, RecordsPassTheGateAndCarryQuestions) {
  const auto corpus = build_corpus(testing::small_pool(), {}, random_policy(), "random", small_options(20, 3));
  ASSERT_EQ(corpus.size(), 20u);
  std::set<std::string> ids;
  for (const auto& r : corpus) {
    EXPECT_TRUE(r.hardness.valid());
    EXPECT_FALSE(r.qa_items.empty());
    EXPECT_GE(r.difficulty_tier, 1);
    EXPECT_LE(r.difficulty_tier, 5);
    EXPECT_EQ(r.render_mode, kRenderTemplate);
    EXPECT_EQ(r.hardness, score(r.trace));
    ids.insert(r.story_id);
  }
  EXPECT_EQ(ids.size(), corpus.size());
}

TEST(Corpus, JobsDoNotChangeTheResult) {
  const auto a = build_corpus(testing::small_pool(), {}, random_policy(), "random", small_options(24, 11, 1));
  const auto b = build_corpus(testing::small_pool(), {}, random_policy(), "random", small_options(24, 11, 4));
  EXPECT_EQ(a, b);
}

TEST(Corpus, JsonlRoundTrip) {
  const auto corpus = build_corpus(testing::small_pool(), {}, random_policy(), "random", small_options(10, 5));
  const auto path = (std::filesystem::temp_directory_path() / "osct_corpus_test.jsonl").string();
  write_jsonl(corpus, path);
  EXPECT_EQ(read_jsonl(path), corpus);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j.at("schema"), kDatasetSchema);
  for (const char* key : {"story_id", "trace", "rendered_text", "qa_items", "hardness", "difficulty_tier"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  std::filesystem::remove(path);
  EXPECT_THROW(read_jsonl(path), Error);
}

TEST(Curriculum, StageOneKeepsLowOrderQuestionsOnly) {
  const auto corpus = build_corpus(testing::small_pool(), {}, random_policy(), "random", small_options(30, 9));
  const auto [stage1, stage2] = split_curriculum(corpus);
  EXPECT_EQ(stage2, corpus);
  EXPECT_LE(stage1.size(), corpus.size());
  for (const auto& r : stage1) {
    ASSERT_FALSE(r.qa_items.empty());
    for (const auto& q : r.qa_items) EXPECT_LE(q.tom_order, 2);
  }
  std::size_t eligible = 0;
  for (const auto& r : corpus) {
    eligible += std::any_of(r.qa_items.begin(), r.qa_items.end(), [](const QAItem& q) { return q.tom_order <= 2; });
  }
  EXPECT_EQ(stage1.size(), eligible);
}

TEST(Stats, CountsAddUp) {
  const auto corpus = build_corpus(testing::small_pool(), {}, random_policy(), "random", small_options(25, 1));
  const auto s = corpus_stats(corpus);
  EXPECT_EQ(s.count, 25u);
  std::size_t tiers = 0, bins = 0, questions = 0, expected_questions = 0;
  for (auto n : s.tier_histogram) tiers += n;
  for (auto n : s.hardness_histogram) bins += n;
  for (auto n : s.questions_per_order) questions += n;
  for (const auto& r : corpus) expected_questions += r.qa_items.size();
  EXPECT_EQ(tiers, 25u);
  EXPECT_EQ(bins, 25u);
  EXPECT_EQ(questions, expected_questions);
  double mean = 0.0;
  for (const auto& r : corpus) mean += r.hardness.composite_h / 25.0;
  EXPECT_NEAR(s.mean_hardness, mean, 1e-12);

  const auto path = (std::filesystem::temp_directory_path() / "osct_stats_test.csv").string();
  write_stats_csv(s, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "section,key,value");
  EXPECT_EQ(stats_to_json(s).at("count"), 25);
  std::filesystem::remove(path);
}

TEST(ParallelFor, CoversEveryIndexAndRethrows) {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

}  // namespace
}  // namespace osct
