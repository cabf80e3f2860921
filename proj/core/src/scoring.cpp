#include "osct/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

namespace osct {

namespace {

double clip01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void to_json(nlohmann::json& j, const HardnessReport& r) {
  j = nlohmann::json{{"has_false_belief", r.has_false_belief},
                     {"valid", r.valid()},
                     {"s_osct", r.s_osct},
                     {"s_depth", r.s_depth},
                     {"s_dec", r.s_dec},
                     {"s_soc", r.s_soc},
                     {"s_temp", r.s_temp},
                     {"max_tom_order", r.max_tom_order},
                     {"composite_h", r.composite_h}};
}

void from_json(const nlohmann::json& j, HardnessReport& r) {
  j.at("has_false_belief").get_to(r.has_false_belief);
  j.at("s_osct").get_to(r.s_osct);
  j.at("s_depth").get_to(r.s_depth);
  j.at("s_dec").get_to(r.s_dec);
  j.at("s_soc").get_to(r.s_soc);
  j.at("s_temp").get_to(r.s_temp);
  j.at("max_tom_order").get_to(r.max_tom_order);
  j.at("composite_h").get_to(r.composite_h);
}

bool detect_false_belief(const StoryTrace& t) {
  const auto& w = t.final_world;
  for (std::size_t a = 0; a < w.agent_count(); ++a) {
    for (std::size_t o = 0; o < w.object_count(); ++o) {
      const ObjectId object = make_id<ObjectId>(o);
      const BeliefValue b = t.final_beliefs.query(make_id<AgentId>(a), object);
      if (b && *b != w.object_location(object)) return true;
    }
  }
  return false;
}

DepthScore tom_depth(const StoryTrace& t) {
  // Order >= 2 entries only ever come from events, so the deepest known chain
  // is the deepest causally established one.
  const int order = static_cast<int>(std::clamp<std::size_t>(t.final_beliefs.max_order(), 1, kMaxBeliefOrder));
  return {order, (order - 1) / 3.0};
}

double deception_density(const StoryTrace& t) {
  if (t.empty()) return 0.0;
  const auto deceptive = std::count_if(t.events.begin(), t.events.end(),
                                       [](const StoryEvent& e) { return e.tags.has(Tag::Deceptive); });
  return clip01(static_cast<double>(deceptive) / static_cast<double>(t.size()));
}

std::vector<AgentId> active_agents(const StoryTrace& t) {
  std::set<AgentId> seen;
  for (const auto& e : t.events) {
    seen.insert(e.binding.actor);
    if (e.binding.target) seen.insert(*e.binding.target);
    if (e.binding.third) seen.insert(*e.binding.third);
  }
  return {seen.begin(), seen.end()};
}

double social_complexity(const StoryTrace& t) {
  const auto active = active_agents(t).size();
  if (active == 0) return 0.0;
  const auto comm = std::count_if(t.events.begin(), t.events.end(),
                                  [](const StoryEvent& e) { return e.tags.has(Tag::Communication); });
  return std::min(1.0, static_cast<double>(comm) / (2.0 * static_cast<double>(active)));
}

double temporal_complexity(const StoryTrace& t, AgentId target) {
  if (idx(target) >= t.final_world.agent_count()) {
    throw Error(ErrorKind::InvalidArgument, "temporal_complexity: unknown agent");
  }
  if (t.empty()) return 0.0;
  std::size_t transitions = 0;
  for (const auto& e : t.events) {
    if (moves_object(e) && t.final_beliefs.query(target, *e.binding.object)) ++transitions;
  }
  return clip01(static_cast<double>(transitions) / static_cast<double>(t.size()));
}

double max_temporal_complexity(const StoryTrace& t) {
  double best = 0.0;
  for (std::size_t a = 0; a < t.final_world.agent_count(); ++a) {
    best = std::max(best, temporal_complexity(t, make_id<AgentId>(a)));
  }
  return best;
}

OsctResult detect_osct(const StoryTrace& t) {
  OsctResult r;
  const auto& w = t.final_world;
  std::size_t conflicting = 0;
  for (std::size_t i = 0; i < w.agent_count(); ++i) {
    const AgentId observer = make_id<AgentId>(i);
    for (std::size_t j = 0; j < w.agent_count(); ++j) {
      if (i == j) continue;
      const AgentId subject = make_id<AgentId>(j);
      for (std::size_t o = 0; o < w.object_count(); ++o) {
        const ObjectId object = make_id<ObjectId>(o);
        const BeliefValue own = t.final_beliefs.query(observer, object);
        const BeliefValue modelled = t.final_beliefs.query(Chain{observer, subject}, object);
        if (!own || !modelled) continue;
        ++r.defined_triples;
        if (*own == w.object_location(object) && *modelled != *own) {
          ++conflicting;
          r.conflicts.push_back({observer, subject, object});
        }
      }
    }
  }
  r.present = conflicting > 0;
  r.confidence = r.defined_triples ? static_cast<double>(conflicting) / static_cast<double>(r.defined_triples) : 0.0;
  return r;
}

double composite_hardness(const DimensionScores& s) {
  const auto values = s.as_array();
  double h = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] >= 0.0 && values[k] <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "hardness score outside [0, 1]");
    }
    h += kHardnessWeights[k] * values[k];
  }
  return h;
}

HardnessReport score(const StoryTrace& t) {
  HardnessReport r;
  r.has_false_belief = detect_false_belief(t);
  r.s_osct = detect_osct(t).confidence;
  const auto depth = tom_depth(t);
  r.max_tom_order = depth.max_order;
  r.s_depth = depth.s_depth;
  r.s_dec = deception_density(t);
  r.s_soc = social_complexity(t);
  r.s_temp = max_temporal_complexity(t);
  r.composite_h = composite_hardness(r.scores());
  return r;
}

}  // namespace osct
