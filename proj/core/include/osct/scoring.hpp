#pragma once

#include <array>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/trace.hpp"

namespace osct {

// Composite weights over (osct, depth, deception, social, temporal).
inline constexpr std::array<double, 5> kHardnessWeights{0.40, 0.30, 0.15, 0.075, 0.075};

struct DimensionScores {
  double osct = 0.0;
  double depth = 0.0;
  double deception = 0.0;
  double social = 0.0;
  double temporal = 0.0;

  std::array<double, 5> as_array() const noexcept { return {osct, depth, deception, social, temporal}; }
  bool operator==(const DimensionScores&) const = default;
};

struct HardnessReport {
  bool has_false_belief = false;  // validity gate
  double s_osct = 0.0;
  double s_depth = 0.0;
  double s_dec = 0.0;
  double s_soc = 0.0;
  double s_temp = 0.0;
  int max_tom_order = 1;
  double composite_h = 0.0;

  // A report that fails the gate is not a ToM story; its composite is not a reward.
  bool valid() const noexcept { return has_false_belief; }
  DimensionScores scores() const noexcept { return {s_osct, s_depth, s_dec, s_soc, s_temp}; }

  bool operator==(const HardnessReport&) const = default;
};

void to_json(nlohmann::json& j, const HardnessReport& r);
void from_json(const nlohmann::json& j, HardnessReport& r);

// Some agent holds a known order-1 belief that contradicts reality.
bool detect_false_belief(const StoryTrace& trace);

struct DepthScore {
  int max_order = 1;
  double s_depth = 0.0;
};
DepthScore tom_depth(const StoryTrace& trace);

double deception_density(const StoryTrace& trace);

// Agents named in some event's binding (actor, target or third party).
std::vector<AgentId> active_agents(const StoryTrace& trace);
double social_complexity(const StoryTrace& trace);

// Throws Error(InvalidArgument) for an agent outside the world.
double temporal_complexity(const StoryTrace& trace, AgentId target);
double max_temporal_complexity(const StoryTrace& trace);

struct OsctConflict {
  AgentId observer;
  AgentId subject;
  ObjectId object;
  bool operator==(const OsctConflict&) const = default;
};

struct OsctResult {
  bool present = false;
  double confidence = 0.0;
  std::size_t defined_triples = 0;
  std::vector<OsctConflict> conflicts;
};

// Observer i knows where o really is, holds a model of j's belief about o,
// and that model disagrees with i's own knowledge.
OsctResult detect_osct(const StoryTrace& trace);

// Throws Error(InvalidArgument) when a score lies outside [0, 1].
double composite_hardness(const DimensionScores& scores);

HardnessReport score(const StoryTrace& trace);

}  // namespace osct
