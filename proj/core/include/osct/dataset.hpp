#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/dqn.hpp"
#include "osct/llm.hpp"
#include "osct/qa.hpp"
#include "osct/scoring.hpp"
#include "osct/trace.hpp"

namespace osct {

inline constexpr const char* kDatasetSchema = "osct.dataset/1";
inline constexpr int kTierCount = 5;

struct DatasetRecord {
  std::string story_id;
  StoryTrace trace;
  std::string rendered_text;
  std::string render_mode = kRenderTemplate;
  std::optional<std::string> render_fallback_reason;
  std::vector<QAItem> qa_items;
  HardnessReport hardness;
  int difficulty_tier = 0;  // 0 until tiers are assigned
  std::uint64_t seed = 0;
  std::string policy_id;  // checkpoint id, or "random"

  bool operator==(const DatasetRecord&) const = default;
};

nlohmann::json record_to_json(const DatasetRecord& r);
DatasetRecord record_from_json(const nlohmann::json& j);

// P20, P40, P60, P80 by nearest rank over the corpus hardness values.
struct TierThresholds {
  std::array<double, 4> values{};
};

// Throws Error(InvalidArgument) for fewer than five values.
TierThresholds tier_thresholds(std::vector<double> hardness);
// Tier t holds H in (P_{20(t-1)}, P_{20t}]; a value equal to a threshold takes the lower tier.
int tier_of(double h, const TierThresholds& t) noexcept;
TierThresholds assign_tiers(std::vector<DatasetRecord>& corpus);

// Stage 1 keeps records with at least one question of order <= 2, retaining
// only those questions. Stage 2 is the whole corpus.
std::pair<std::vector<DatasetRecord>, std::vector<DatasetRecord>> split_curriculum(
    const std::vector<DatasetRecord>& corpus);

void write_jsonl(const std::vector<DatasetRecord>& corpus, const std::string& path);
std::vector<DatasetRecord> read_jsonl(const std::string& path);

struct CorpusStats {
  std::size_t count = 0;
  TierThresholds thresholds;
  std::array<std::size_t, kTierCount> tier_histogram{};
  std::array<std::size_t, 20> hardness_histogram{};  // bins of width 0.05 over [0, 1]
  DimensionScores dimension_means;
  double mean_hardness = 0.0;
  std::array<std::size_t, kMaxBeliefOrder> questions_per_order{};
  std::size_t llm_rendered = 0;
  std::size_t render_fallbacks = 0;
};

CorpusStats corpus_stats(const std::vector<DatasetRecord>& corpus);
nlohmann::json stats_to_json(const CorpusStats& s);
void write_stats_csv(const CorpusStats& s, const std::string& path);

struct DatasetOptions {
  std::size_t count = 100;
  std::uint64_t seed = 0;
  double epsilon = 0.05;  // exploration during generation rollouts
  int max_attempts = 200;  // rollouts per record before giving up
  int jobs = 1;
};

// One rollout under the final curriculum phase.
StoryTrace roll_out(StoryEnv& env, const Policy& policy, std::uint64_t seed);

// Rolls out stories until `count` pass the false-belief gate and yield at
// least one question, then assigns tiers and renders. Deterministic for a
// given seed and policy regardless of `jobs`. A renderer of nullptr means
// template rendering.
std::vector<DatasetRecord> build_corpus(const ContextPool& pool, const EnvConfig& env_config, const Policy& policy,
                                        const std::string& policy_id, const DatasetOptions& options,
                                        LlmRenderer* renderer = nullptr);

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace osct
