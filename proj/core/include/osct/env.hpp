#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/scoring.hpp"
#include "osct/trace.hpp"

namespace osct {

inline constexpr std::size_t kObservationSize = 256;
using Observation = std::array<float, kObservationSize>;

// Fixed observation layout. Slots past kObsUnused are always zero.
namespace obs {
inline constexpr std::size_t kLength = 0;
inline constexpr std::size_t kActiveAgents = 1;
inline constexpr std::size_t kActiveObjects = 2;
inline constexpr std::size_t kPrevScores = 3;      // gate, osct, depth, dec, soc, temp
inline constexpr std::size_t kActionHistogram = 9;  // 15 slots
inline constexpr std::size_t kFalseBelief = 24;     // per agent
inline constexpr std::size_t kUnknownBelief = 28;   // per agent
inline constexpr std::size_t kPairDisagree = 32;    // 4x4
inline constexpr std::size_t kPairMisattrib = 48;   // 4x4
inline constexpr std::size_t kPairConflict = 64;    // 4x4
inline constexpr std::size_t kPairModelled = 80;    // 4x4
inline constexpr std::size_t kOrderFill = 96;       // orders 1..4
inline constexpr std::size_t kObjectFalse = 100;    // per object
inline constexpr std::size_t kLegalMask = 104;      // 15 slots
inline constexpr std::size_t kCurrentScores = 119;  // gate, osct, depth, dec, soc, temp
inline constexpr std::size_t kCurrentHardness = 125;
inline constexpr std::size_t kCompany = 126;  // per agent
inline constexpr std::size_t kUnused = 130;
inline constexpr std::size_t kMaxAgents = 4;
inline constexpr std::size_t kMaxObjects = 4;
}  // namespace obs

// Predefined names, room layouts and object inventories that episodes draw from.
struct ContextPool {
  std::vector<std::string> agent_names;
  std::vector<std::vector<RoomSpec>> room_layouts;
  std::vector<std::vector<std::string>> object_inventories;
  int min_agents = 2;
  int max_agents = 4;
  int min_objects = 1;
  int max_objects = 3;

  bool empty() const noexcept {
    return agent_names.empty() || room_layouts.empty() || object_inventories.empty();
  }
};

void to_json(nlohmann::json& j, const ContextPool& pool);
void from_json(const nlohmann::json& j, ContextPool& pool);

ContextPool default_context_pool();
ContextPool load_context_pool(const std::string& path);

// Draws a world deterministically from the pool. Throws Error(InvalidArgument)
// for an empty or inconsistent pool.
WorldSpec sample_world(const ContextPool& pool, std::mt19937_64& rng);

struct PhaseWeights {
  double hardness;
  double diversity;
  double validity;
};

struct CurriculumPhase {
  int phase = 1;
  double w_hardness = 0.2;
  double w_diversity = 0.2;
  double w_validity = 0.6;
};

inline constexpr std::array<PhaseWeights, 3> kDefaultPhaseWeights{{
    {0.2, 0.2, 0.6},
    {0.5, 0.2, 0.3},
    {0.8, 0.1, 0.1},
}};

// Thirds of the run: validity first, hardness last.
CurriculumPhase curriculum_weights(std::uint64_t global_step, std::uint64_t total_steps,
                                   const std::array<PhaseWeights, 3>& weights = kDefaultPhaseWeights);

struct EnvConfig {
  int episode_length = 15;
  double illegal_penalty = -0.05;
  double gate_failure_reward = -1.0;
  std::array<PhaseWeights, 3> phase_weights = kDefaultPhaseWeights;
};

void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);

// End-of-episode reward before clamping: the gate-failure reward when the
// story has no false belief, otherwise the phase-weighted hardness, diversity
// and validity terms.
double terminal_reward(const HardnessReport& report, double diversity, const CurriculumPhase& phase,
                       const EnvConfig& config) noexcept;

struct StepInfo {
  bool legal = false;
  std::optional<Binding> binding;
  std::optional<HardnessReport> report;  // terminal step only
  double diversity = 0.0;                // distinct actions used / 15, terminal step only
};

struct StepResult {
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Episodic story-writing MDP. The policy picks one of the 15 action ids;
// arguments are drawn by a seeded chooser over that action's legal bindings.
// Not thread-safe; run one instance per thread.
class StoryEnv {
 public:
  explicit StoryEnv(ContextPool pool = default_context_pool(), EnvConfig config = {});

  Observation reset(std::uint64_t seed);
  // Starts an episode from a fixed world instead of sampling one.
  Observation reset_with(const WorldSpec& spec, std::uint64_t seed);

  StepResult step(int action_index);

  void set_phase(const CurriculumPhase& phase) noexcept { phase_ = phase; }
  void set_progress(std::uint64_t global_step, std::uint64_t total_steps) {
    phase_ = curriculum_weights(global_step, total_steps, config_.phase_weights);
  }
  const CurriculumPhase& phase() const noexcept { return phase_; }

  bool done() const noexcept { return done_; }
  int steps_taken() const noexcept { return steps_; }
  // Throws Error(State) before the episode has finished.
  const StoryTrace& episode_trace() const;
  const StoryTrace& current_trace() const noexcept { return trace_; }
  const std::optional<HardnessReport>& last_report() const noexcept { return last_report_; }
  std::array<bool, kActionCount> legal_mask() const;

  const EnvConfig& config() const noexcept { return config_; }
  const ContextPool& pool() const noexcept { return pool_; }

  Observation observe() const;

 private:
  ContextPool pool_;
  EnvConfig config_;
  CurriculumPhase phase_ = curriculum_weights(0, 1);

  StoryTrace trace_;
  std::mt19937_64 binder_rng_;
  int steps_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::array<int, kActionCount> action_counts_{};
  std::optional<HardnessReport> last_report_;
  std::array<float, 6> prev_scores_{};
};

// Encodes a report as the six carried slots: gate, osct, depth, dec, soc, temp.
std::array<float, 6> report_slots(const HardnessReport& report);

}  // namespace osct
