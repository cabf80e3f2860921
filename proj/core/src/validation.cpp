#include "osct/validation.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "osct/dataset.hpp"

namespace osct {

namespace {

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xFF;
    h *= 0x100000001B3ull;
  }
  return h;
}

// Maps each name to the order in which it first appears in the story.
class Canonicalizer {
 public:
  std::uint64_t slot(char kind, std::uint16_t index) {
    const auto key = std::pair(kind, index);
    auto [it, inserted] = slots_.try_emplace(key, slots_.size());
    return it->second;
  }

 private:
  std::map<std::pair<char, std::uint16_t>, std::uint64_t> slots_;
};

}  // namespace

std::uint64_t structural_signature(const StoryTrace& trace) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  Canonicalizer agents, things;
  for (const auto& e : trace.events) {
    const auto& b = e.binding;
    h = fnv1a(h, 0x100 + idx(e.action));
    h = fnv1a(h, agents.slot('a', idx(b.actor)));
    // Absent roles hash as a distinct marker so patterns cannot collide.
    constexpr std::uint64_t kNone = ~0ull;
    h = fnv1a(h, b.target ? agents.slot('a', idx(*b.target)) : kNone);
    h = fnv1a(h, b.third ? agents.slot('a', idx(*b.third)) : kNone);
    h = fnv1a(h, b.object ? things.slot('o', idx(*b.object)) : kNone);
    h = fnv1a(h, b.location ? things.slot(b.location->is_room() ? 'r' : 'c', b.location->index) : kNone);
    h = fnv1a(h, b.room ? things.slot('r', idx(*b.room)) : kNone);
  }
  return fnv1a(h, trace.events.size());
}

void to_json(nlohmann::json& j, const DiversityThresholds& t) {
  j = nlohmann::json{{"min_action_coverage", t.min_action_coverage},
                     {"min_uniqueness", t.min_uniqueness},
                     {"min_character_diversity", t.min_character_diversity}};
}

void from_json(const nlohmann::json& j, DiversityThresholds& t) {
  try {
    if (j.contains("min_action_coverage")) j.at("min_action_coverage").get_to(t.min_action_coverage);
    if (j.contains("min_uniqueness")) j.at("min_uniqueness").get_to(t.min_uniqueness);
    if (j.contains("min_character_diversity")) j.at("min_character_diversity").get_to(t.min_character_diversity);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, std::string("validation thresholds: ") + e.what());
  }
}

bool diversity_verdict(const DiversityReport& r) {
  if (r.episodes == 0) return false;
  const double uniqueness = static_cast<double>(r.unique_story_count) / static_cast<double>(r.episodes);
  return r.action_coverage >= r.thresholds.min_action_coverage && uniqueness >= r.thresholds.min_uniqueness &&
         r.character_diversity >= r.thresholds.min_character_diversity;
}

DiversityReport diversity_report(const std::vector<StoryTrace>& stories, std::size_t timesteps,
                                 const DiversityThresholds& thresholds) {
  DiversityReport r;
  r.thresholds = thresholds;
  r.episodes = stories.size();
  r.timesteps = timesteps;
  std::set<std::uint64_t> signatures;
  std::set<std::string> characters;
  std::vector<double> lengths;
  for (const auto& s : stories) {
    for (const auto& e : s.events) ++r.action_counts[idx(e.action)];
    r.action_steps += s.events.size();
    signatures.insert(structural_signature(s));
    lengths.push_back(static_cast<double>(s.events.size()));
    for (std::size_t a = 0; a < s.initial_world.agent_count(); ++a) {
      characters.insert(s.initial_world.name(make_id<AgentId>(a)));
      ++r.character_slots;
    }
  }
  const auto used = std::count_if(r.action_counts.begin(), r.action_counts.end(), [](auto c) { return c > 0; });
  r.action_coverage = static_cast<double>(used) / static_cast<double>(kActionCount);
  r.unique_story_count = signatures.size();
  r.unique_characters = characters.size();
  r.character_diversity =
      r.character_slots ? static_cast<double>(r.unique_characters) / static_cast<double>(r.character_slots) : 0.0;
  if (!lengths.empty()) {
    double sum = 0.0;
    for (double l : lengths) sum += l;
    r.length_mean = sum / static_cast<double>(lengths.size());
    double var = 0.0;
    for (double l : lengths) var += (l - r.length_mean) * (l - r.length_mean);
    r.length_stddev = std::sqrt(var / static_cast<double>(lengths.size()));
  }
  r.pass = diversity_verdict(r);
  return r;
}

DiversityReport randomization_test(const Policy& policy, const ContextPool& pool, const EnvConfig& env_config,
                                   std::size_t episodes, double epsilon, std::uint64_t seed,
                                   const DiversityThresholds& thresholds, int jobs) {
  if (episodes == 0) throw Error(ErrorKind::InvalidArgument, "randomization test needs at least one episode");
  const Policy explore = [&policy, epsilon](const Observation& obs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> uniform(0, static_cast<int>(kActionCount) - 1);
    const double u = coin(rng);
    const int random_action = uniform(rng);
    return u < epsilon ? random_action : policy(obs, rng);
  };
  std::vector<StoryTrace> stories(episodes);
  std::vector<std::size_t> decisions(episodes, 0);
  parallel_for(episodes, jobs, [&](std::size_t i) {
    StoryEnv env(pool, env_config);
    stories[i] = roll_out(env, explore, episode_seed(seed, i));
    decisions[i] = static_cast<std::size_t>(env.steps_taken());
  });
  std::size_t timesteps = 0;
  for (auto d : decisions) timesteps += d;
  return diversity_report(stories, timesteps, thresholds);
}

nlohmann::json report_to_json(const DiversityReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (std::size_t a = 0; a < kActionCount; ++a) counts[std::string(action_name(static_cast<ActionId>(a)))] = r.action_counts[a];
  return {{"episodes", r.episodes},
          {"timesteps", r.timesteps},
          {"action_steps", r.action_steps},
          {"action_counts", counts},
          {"action_coverage", r.action_coverage},
          {"unique_story_count", r.unique_story_count},
          {"story_length_mean", r.length_mean},
          {"story_length_stddev", r.length_stddev},
          {"character_slots", r.character_slots},
          {"unique_characters", r.unique_characters},
          {"character_diversity", r.character_diversity},
          {"thresholds", r.thresholds},
          {"verdict", r.pass ? "PASS" : "FAIL"}};
}

std::string report_table(const DiversityReport& r) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << "episodes             " << r.episodes << "\n";
  out << "decisions / events   " << r.timesteps << " / " << r.action_steps << "\n";
  out << "action coverage      " << r.action_coverage << "  (min " << r.thresholds.min_action_coverage << ")\n";
  out << "unique stories       " << r.unique_story_count << " / " << r.episodes << "\n";
  out << "story length         " << r.length_mean << " +- " << r.length_stddev << "\n";
  out << "character diversity  " << r.character_diversity << "  (" << r.unique_characters << " / "
      << r.character_slots << ", min " << r.thresholds.min_character_diversity << ")\n";
  out << "\naction                        count\n";
  for (std::size_t a = 0; a < kActionCount; ++a) {
    std::string name(action_name(static_cast<ActionId>(a)));
    name.resize(30, ' ');
    out << name << r.action_counts[a] << "\n";
  }
  out << "\nverdict: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace osct
