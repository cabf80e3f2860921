#include "osct/qa.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include <nlohmann/json.hpp>

namespace osct {

std::string question_text(const Chain& chain, ObjectId object, const WorldState& world) {
  std::string q = "Where does " + world.name(chain.front()) + " think";
  for (std::size_t i = 1; i < chain.order(); ++i) {
    q += (i == 1 ? " " : " believes ");
    q += world.name(chain[i]);
  }
  q += chain.order() == 1 ? " the " : " believes the ";
  q += world.name(object) + " is?";
  return q;
}

std::vector<QAItem> generate_questions(const StoryTrace& trace) {
  const auto& world = trace.final_world;
  struct Candidate {
    bool divergent;
    Chain chain;
    ObjectId object;
    Location answer;
  };
  std::array<std::vector<Candidate>, kMaxBeliefOrder> by_order;
  trace.final_beliefs.for_each([&](const Chain& chain, ObjectId object, Location value) {
    by_order[chain.order() - 1].push_back({value != world.object_location(object), chain, object, value});
  });

  std::vector<QAItem> out;
  for (auto& candidates : by_order) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      return std::tuple(!a.divergent, a.chain, idx(a.object)) < std::tuple(!b.divergent, b.chain, idx(b.object));
    });
    const std::size_t keep = std::min(candidates.size(), kMaxQuestionsPerOrder);
    for (std::size_t i = 0; i < keep; ++i) {
      const auto& c = candidates[i];
      const auto agents = c.chain.agents();
      out.push_back({static_cast<int>(c.chain.order()),
                     {agents.begin(), agents.end()},
                     c.object,
                     question_text(c.chain, c.object, world),
                     c.answer,
                     c.divergent});
    }
  }
  return out;
}

nlohmann::json qa_to_json(const QAItem& item, const WorldState& world) {
  nlohmann::json chain = nlohmann::json::array();
  for (AgentId a : item.agent_chain) chain.push_back(world.name(a));
  return {{"tom_order", item.tom_order},
          {"agent_chain", chain},
          {"object", world.name(item.object)},
          {"question_text", item.question_text},
          {"answer", item.answer ? nlohmann::json(world.name(*item.answer)) : nlohmann::json(nullptr)},
          {"answer_is_ground_truth_divergent", item.answer_is_ground_truth_divergent}};
}

QAItem qa_from_json(const nlohmann::json& j, const WorldState& world) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Parse, "qa item: " + what); };
  try {
    QAItem item;
    item.tom_order = j.at("tom_order").get<int>();
    for (const auto& name : j.at("agent_chain")) {
      const auto a = world.find_agent(name.get<std::string>());
      if (!a) fail("unknown agent " + name.get<std::string>());
      item.agent_chain.push_back(*a);
    }
    const auto object = world.find_object(j.at("object").get<std::string>());
    if (!object) fail("unknown object");
    item.object = *object;
    item.question_text = j.at("question_text").get<std::string>();
    if (!j.at("answer").is_null()) {
      const auto loc = world.find_location(j.at("answer").get<std::string>());
      if (!loc) fail("unknown answer location");
      item.answer = *loc;
    }
    item.answer_is_ground_truth_divergent = j.at("answer_is_ground_truth_divergent").get<bool>();
    if (item.tom_order != static_cast<int>(item.agent_chain.size())) fail("tom_order disagrees with chain length");
    return item;
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  return {};
}

}  // namespace osct
