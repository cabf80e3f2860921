#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/dqn.hpp"
#include "osct/trace.hpp"

namespace osct {

// 64-bit digest of the ordered (action, role pattern) sequence. Agents, objects
// and places are replaced by the index of their first appearance, so two
// stories that differ only by renaming share a signature.
std::uint64_t structural_signature(const StoryTrace& trace);

struct DiversityThresholds {
  double min_action_coverage = 0.8;
  double min_uniqueness = 1.0;  // unique signatures / episodes
  double min_character_diversity = 0.6;
};

void to_json(nlohmann::json& j, const DiversityThresholds& t);
void from_json(const nlohmann::json& j, DiversityThresholds& t);

struct DiversityReport {
  std::size_t episodes = 0;
  std::size_t timesteps = 0;  // policy decisions
  std::size_t action_steps = 0;  // decisions that became events
  std::array<std::size_t, kActionCount> action_counts{};
  double action_coverage = 0.0;
  std::size_t unique_story_count = 0;
  double length_mean = 0.0;
  double length_stddev = 0.0;
  std::size_t character_slots = 0;
  std::size_t unique_characters = 0;
  double character_diversity = 0.0;
  DiversityThresholds thresholds;
  bool pass = false;
};

// The verdict as a pure function of the report fields and thresholds.
bool diversity_verdict(const DiversityReport& r);

// Builds a report from finished stories and the number of policy decisions.
DiversityReport diversity_report(const std::vector<StoryTrace>& stories, std::size_t timesteps,
                                 const DiversityThresholds& thresholds = {});

// Rolls out `episodes` stories in parallel (one env per worker) under the
// final curriculum phase with epsilon-greedy exploration wrapped around the policy.
DiversityReport randomization_test(const Policy& policy, const ContextPool& pool, const EnvConfig& env_config,
                                   std::size_t episodes = 20, double epsilon = 0.05, std::uint64_t seed = 0,
                                   const DiversityThresholds& thresholds = {}, int jobs = 1);

nlohmann::json report_to_json(const DiversityReport& r);
std::string report_table(const DiversityReport& r);

}  // namespace osct
