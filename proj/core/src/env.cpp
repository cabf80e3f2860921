#include "osct/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

namespace osct {

namespace {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

float clip01f(double x) { return static_cast<float>(std::clamp(x, 0.0, 1.0)); }

}  // namespace

void to_json(nlohmann::json& j, const ContextPool& pool) {
  nlohmann::json layouts = nlohmann::json::array();
  for (const auto& layout : pool.room_layouts) {
    nlohmann::json rooms = nlohmann::json::array();
    for (const auto& r : layout) rooms.push_back({{"name", r.name}, {"containers", r.containers}});
    layouts.push_back(rooms);
  }
  j = nlohmann::json{{"agent_names", pool.agent_names},
                     {"room_layouts", layouts},
                     {"object_inventories", pool.object_inventories},
                     {"agents_per_story", {pool.min_agents, pool.max_agents}},
                     {"objects_per_story", {pool.min_objects, pool.max_objects}}};
}

void from_json(const nlohmann::json& j, ContextPool& pool) {
  pool = ContextPool{};
  j.at("agent_names").get_to(pool.agent_names);
  for (const auto& layout : j.at("room_layouts")) {
    std::vector<RoomSpec> rooms;
    for (const auto& r : layout) {
      RoomSpec room;
      r.at("name").get_to(room.name);
      if (r.contains("containers")) r.at("containers").get_to(room.containers);
      rooms.push_back(std::move(room));
    }
    pool.room_layouts.push_back(std::move(rooms));
  }
  j.at("object_inventories").get_to(pool.object_inventories);
  if (j.contains("agents_per_story")) {
    pool.min_agents = j["agents_per_story"].at(0).get<int>();
    pool.max_agents = j["agents_per_story"].at(1).get<int>();
  }
  if (j.contains("objects_per_story")) {
    pool.min_objects = j["objects_per_story"].at(0).get<int>();
    pool.max_objects = j["objects_per_story"].at(1).get<int>();
  }
}

ContextPool default_context_pool() {
  ContextPool pool;
  pool.agent_names = {
      "Alice",   "Bob",     "Carol",   "David",   "Emma",    "Frank",   "Grace",   "Henry",   "Isla",
      "Jack",    "Kara",    "Liam",    "Mia",     "Noah",    "Olivia",  "Peter",   "Quinn",   "Rosa",
      "Sam",     "Tara",    "Umar",    "Vera",    "Will",    "Xena",    "Yusuf",   "Zoe",     "Amir",
      "Bella",   "Caleb",   "Daria",   "Elias",   "Fiona",   "Gabriel", "Hana",    "Ivan",    "Julia",
      "Kenji",   "Lena",    "Marco",   "Nadia",   "Oscar",   "Priya",   "Rafael",  "Sofia",   "Theo",
      "Uma",     "Victor",  "Wanda",   "Xavier",  "Yara",    "Zane",    "Aiden",   "Beatriz", "Chen",
      "Dmitri",  "Esther",  "Felix",   "Greta",   "Hugo",    "Ingrid",  "Jonah",   "Keiko",   "Leo",
      "Maya",    "Nikolai", "Opal",    "Pablo",   "Rhea",    "Silas",   "Tessa",   "Ulrich",  "Violet",
      "Wesley",  "Yuki",    "Zara",    "Anton",   "Brigid",  "Cyrus",   "Delia",   "Emil",    "Farah",
      "Gideon",  "Hazel",   "Idris",   "Jasmine", "Kofi",    "Lucia",   "Milo",    "Nora",    "Orion",
      "Penny",   "Ronan",   "Sage",    "Tobias",  "Ursula",  "Vikram",  "Willa",   "Yosef",   "Zelda",
  };
  pool.room_layouts = {
      {{"kitchen", {"basket", "cupboard"}}, {"living room", {"box", "drawer"}}, {"garden", {"shed"}}},
      {{"office", {"desk drawer", "filing cabinet"}}, {"hallway", {"umbrella stand"}}, {"break room", {"fridge"}}},
      {{"classroom", {"backpack", "desk"}}, {"library", {"bookshelf"}}, {"playground", {"sandbox"}}},
      {{"bedroom", {"wardrobe", "chest"}}, {"bathroom", {"cabinet"}}, {"attic", {"trunk"}}},
      {{"lab", {"locker", "crate"}}, {"workshop", {"toolbox"}}},
  };
  pool.object_inventories = {
      {"ball", "key", "apple", "book"},
      {"watch", "letter", "phone", "scarf"},
      {"coin", "map", "pen", "ring"},
  };
  return pool;
}

ContextPool load_context_pool(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open context pool: " + path);
  try {
    return nlohmann::json::parse(in).get<ContextPool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "malformed context pool " + path + ": " + e.what());
  }
}

WorldSpec sample_world(const ContextPool& pool, std::mt19937_64& rng) {
  if (pool.empty()) throw Error(ErrorKind::InvalidArgument, "context pool is empty");
  if (pool.min_agents < 2 || pool.max_agents < pool.min_agents || pool.min_objects < 1 ||
      pool.max_objects < pool.min_objects) {
    throw Error(ErrorKind::InvalidArgument, "context pool has inconsistent story sizes");
  }

  const auto& layout = pool.room_layouts[uniform_index(rng, pool.room_layouts.size())];
  const auto& inventory = pool.object_inventories[uniform_index(rng, pool.object_inventories.size())];
  if (layout.size() < 2) throw Error(ErrorKind::InvalidArgument, "room layout needs at least 2 rooms");

  const auto n_agents = std::min<std::size_t>(
      pool.agent_names.size(),
      std::uniform_int_distribution<int>(pool.min_agents, pool.max_agents)(rng));
  const auto n_objects = std::min<std::size_t>(
      inventory.size(), std::uniform_int_distribution<int>(pool.min_objects, pool.max_objects)(rng));
  if (n_agents < 2 || n_objects < 1) throw Error(ErrorKind::InvalidArgument, "context pool too small");

  WorldSpec spec;
  spec.rooms = layout;
  std::vector<std::string> names = pool.agent_names;
  std::shuffle(names.begin(), names.end(), rng);
  spec.agents.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n_agents));
  std::vector<std::string> things = inventory;
  std::shuffle(things.begin(), things.end(), rng);
  spec.objects.assign(things.begin(), things.begin() + static_cast<std::ptrdiff_t>(n_objects));

  // The cast gathers in one room; later arrivals may be elsewhere. The first
  // two always share a room so conversation is possible from the start.
  const std::size_t gathering = uniform_index(rng, layout.size());
  std::bernoulli_distribution stays(0.75);
  for (std::size_t a = 0; a < spec.agents.size(); ++a) {
    const std::size_t room = (a < 2 || stays(rng)) ? gathering : uniform_index(rng, layout.size());
    spec.agent_placements[spec.agents[a]] = layout[room].name;
  }

  std::vector<std::string> places;
  for (const auto& r : layout) {
    places.push_back(r.name);
    for (const auto& c : r.containers) places.push_back(c);
  }
  for (const auto& o : spec.objects) spec.object_placements[o] = places[uniform_index(rng, places.size())];
  return spec;
}

CurriculumPhase curriculum_weights(std::uint64_t global_step, std::uint64_t total_steps,
                                   const std::array<PhaseWeights, 3>& weights) {
  int phase = 1;
  if (total_steps > 0) {
    if (3 * global_step >= 2 * total_steps) {
      phase = 3;
    } else if (3 * global_step >= total_steps) {
      phase = 2;
    }
  }
  const auto& w = weights[static_cast<std::size_t>(phase - 1)];
  return {phase, w.hardness, w.diversity, w.validity};
}

void to_json(nlohmann::json& j, const EnvConfig& c) {
  nlohmann::json phases = nlohmann::json::array();
  for (const auto& p : c.phase_weights) {
    phases.push_back({{"hardness", p.hardness}, {"diversity", p.diversity}, {"validity", p.validity}});
  }
  j = nlohmann::json{{"episode_length", c.episode_length},
                     {"illegal_penalty", c.illegal_penalty},
                     {"gate_failure_reward", c.gate_failure_reward},
                     {"phase_weights", phases}};
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
  c = EnvConfig{};
  c.episode_length = j.value("episode_length", c.episode_length);
  c.illegal_penalty = j.value("illegal_penalty", c.illegal_penalty);
  c.gate_failure_reward = j.value("gate_failure_reward", c.gate_failure_reward);
  if (j.contains("phase_weights")) {
    const auto& phases = j["phase_weights"];
    if (phases.size() != 3) throw Error(ErrorKind::Config, "phase_weights needs exactly 3 phases");
    for (std::size_t i = 0; i < 3; ++i) {
      PhaseWeights p{phases[i].at("hardness").get<double>(), phases[i].at("diversity").get<double>(),
                     phases[i].at("validity").get<double>()};
      if (p.hardness < 0 || p.diversity < 0 || p.validity < 0 ||
          std::abs(p.hardness + p.diversity + p.validity - 1.0) > 1e-9) {
        throw Error(ErrorKind::Config, "phase weights must be nonnegative and sum to 1");
      }
      c.phase_weights[i] = p;
    }
  }
  if (c.episode_length < 1) throw Error(ErrorKind::Config, "episode_length must be positive");
}

std::array<float, 6> report_slots(const HardnessReport& r) {
  return {r.has_false_belief ? 1.0f : 0.0f, clip01f(r.s_osct), clip01f(r.s_depth),
          clip01f(r.s_dec),                 clip01f(r.s_soc),  clip01f(r.s_temp)};
}

StoryEnv::StoryEnv(ContextPool pool, EnvConfig config) : pool_(std::move(pool)), config_(config) {
  if (pool_.empty()) throw Error(ErrorKind::InvalidArgument, "context pool is empty");
  phase_ = curriculum_weights(0, 1, config_.phase_weights);
}

Observation StoryEnv::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const WorldSpec spec = sample_world(pool_, rng);
  return reset_with(spec, rng());
}

Observation StoryEnv::reset_with(const WorldSpec& spec, std::uint64_t seed) {
  trace_ = start_trace(init_world(spec));
  binder_rng_.seed(seed);
  steps_ = 0;
  started_ = true;
  done_ = false;
  action_counts_.fill(0);
  return observe();
}

StepResult StoryEnv::step(int action_index) {
  if (!started_) throw Error(ErrorKind::State, "step before reset");
  if (done_) throw Error(ErrorKind::State, "step after episode end");
  const auto action = action_from_index(action_index);
  if (!action) throw Error(ErrorKind::InvalidArgument, "action index out of range");

  StepResult out;
  const auto bindings = legal_bindings(trace_.final_world, trace_.final_beliefs, *action);
  if (bindings.empty()) {
    out.reward = config_.illegal_penalty;
  } else {
    const Binding& chosen = bindings[uniform_index(binder_rng_, bindings.size())];
    trace_.events.push_back(
        apply_in_place(*action, chosen, trace_.final_world, trace_.final_beliefs, trace_.events.size()));
    ++action_counts_[idx(*action)];
    out.info.legal = true;
    out.info.binding = chosen;
  }

  ++steps_;
  if (steps_ >= config_.episode_length) {
    done_ = true;
    const HardnessReport report = score(trace_);
    const auto distinct = std::count_if(action_counts_.begin(), action_counts_.end(), [](int c) { return c > 0; });
    out.info.diversity = static_cast<double>(distinct) / static_cast<double>(kActionCount);
    out.info.report = report;
    out.reward = std::clamp(out.reward + terminal_reward(report, out.info.diversity, phase_, config_), -1.0, 1.0);
    last_report_ = report;
    prev_scores_ = report_slots(report);
  }
  out.done = done_;
  out.observation = observe();
  return out;
}

double terminal_reward(const HardnessReport& report, double diversity, const CurriculumPhase& phase,
                       const EnvConfig& config) noexcept {
  if (!report.valid()) return config.gate_failure_reward;
  return phase.w_hardness * report.composite_h + phase.w_diversity * diversity + phase.w_validity * 1.0;
}

const StoryTrace& StoryEnv::episode_trace() const {
  if (!done_) throw Error(ErrorKind::State, "episode_trace called before the episode finished");
  return trace_;
}

std::array<bool, kActionCount> StoryEnv::legal_mask() const {
  std::array<bool, kActionCount> mask{};
  for (std::size_t a = 0; a < kActionCount; ++a) {
    mask[a] = has_legal_binding(trace_.final_world, trace_.final_beliefs, static_cast<ActionId>(a));
  }
  return mask;
}

Observation StoryEnv::observe() const {
  Observation o{};
  const auto& w = trace_.final_world;
  const auto& b = trace_.final_beliefs;
  const double len = static_cast<double>(config_.episode_length);

  o[obs::kLength] = clip01f(steps_ / len);
  o[obs::kActiveAgents] = clip01f(static_cast<double>(active_agents(trace_).size()) / obs::kMaxAgents);
  std::set<ObjectId> touched;
  for (const auto& e : trace_.events) {
    if (e.binding.object) touched.insert(*e.binding.object);
  }
  o[obs::kActiveObjects] = clip01f(static_cast<double>(touched.size()) / obs::kMaxObjects);
  std::copy(prev_scores_.begin(), prev_scores_.end(), o.begin() + obs::kPrevScores);
  for (std::size_t a = 0; a < kActionCount; ++a) {
    o[obs::kActionHistogram + a] = clip01f(action_counts_[a] / len);
  }

  const std::size_t n_agents = std::min(w.agent_count(), obs::kMaxAgents);
  const std::size_t n_objects = std::min(w.object_count(), obs::kMaxObjects);
  const double per_object = 1.0 / static_cast<double>(w.object_count());

  for (std::size_t i = 0; i < n_agents; ++i) {
    const AgentId ai = make_id<AgentId>(i);
    double wrong = 0, unknown = 0;
    for (std::size_t k = 0; k < w.object_count(); ++k) {
      const ObjectId obj = make_id<ObjectId>(k);
      const BeliefValue v = b.query(ai, obj);
      if (!v) {
        unknown += per_object;
      } else if (*v != w.object_location(obj)) {
        wrong += per_object;
      }
    }
    o[obs::kFalseBelief + i] = clip01f(wrong);
    o[obs::kUnknownBelief + i] = clip01f(unknown);
    o[obs::kCompany + i] =
        clip01f(static_cast<double>(w.agents_in(w.agent_room(ai)).size() - 1) / (obs::kMaxAgents - 1));

    for (std::size_t j = 0; j < n_agents; ++j) {
      if (i == j) continue;
      const AgentId aj = make_id<AgentId>(j);
      double disagree = 0, misattrib = 0, conflict = 0, modelled = 0;
      for (std::size_t k = 0; k < w.object_count(); ++k) {
        const ObjectId obj = make_id<ObjectId>(k);
        const BeliefValue own = b.query(ai, obj);
        const BeliefValue theirs = b.query(aj, obj);
        const BeliefValue model = b.query(Chain{ai, aj}, obj);
        if (own != theirs) disagree += per_object;
        if (model) {
          modelled += per_object;
          if (model != theirs) misattrib += per_object;
          if (own && *own == w.object_location(obj) && *model != *own) conflict += per_object;
        }
      }
      const std::size_t cell = i * obs::kMaxAgents + j;
      o[obs::kPairDisagree + cell] = clip01f(disagree);
      o[obs::kPairMisattrib + cell] = clip01f(misattrib);
      o[obs::kPairConflict + cell] = clip01f(conflict);
      o[obs::kPairModelled + cell] = clip01f(modelled);
    }
  }

  // Fill ratio of each belief order against the number of possible chains.
  std::array<double, kMaxBeliefOrder> filled{};
  for (const auto& [chain, layer] : b.layers()) filled[chain.order() - 1] += static_cast<double>(layer.size());
  const double n = static_cast<double>(w.agent_count());
  double chains = n;
  for (std::size_t k = 0; k < kMaxBeliefOrder; ++k) {
    o[obs::kOrderFill + k] = clip01f(filled[k] / (chains * static_cast<double>(w.object_count())));
    chains *= (n - 1);
  }

  for (std::size_t k = 0; k < n_objects; ++k) {
    const ObjectId obj = make_id<ObjectId>(k);
    double wrong = 0;
    for (std::size_t i = 0; i < w.agent_count(); ++i) {
      const BeliefValue v = b.query(make_id<AgentId>(i), obj);
      if (v && *v != w.object_location(obj)) wrong += 1.0 / n;
    }
    o[obs::kObjectFalse + k] = clip01f(wrong);
  }

  if (!done_) {
    const auto mask = legal_mask();
    for (std::size_t a = 0; a < kActionCount; ++a) o[obs::kLegalMask + a] = mask[a] ? 1.0f : 0.0f;
  }

  const HardnessReport current = score(trace_);
  const auto slots = report_slots(current);
  std::copy(slots.begin(), slots.end(), o.begin() + obs::kCurrentScores);
  o[obs::kCurrentHardness] = clip01f(current.composite_h);
  return o;
}

}  // namespace osct
