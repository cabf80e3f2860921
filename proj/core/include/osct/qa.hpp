#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "osct/trace.hpp"

namespace osct {

inline constexpr std::size_t kMaxQuestionsPerOrder = 5;

struct QAItem {
  int tom_order = 1;
  std::vector<AgentId> agent_chain;
  ObjectId object{};
  std::string question_text;
  BeliefValue answer;
  bool answer_is_ground_truth_divergent = false;

  bool operator==(const QAItem&) const = default;
};

// "Where does Alice think Bob believes the ball is?"
std::string question_text(const Chain& chain, ObjectId object, const WorldState& world);

// Up to five questions per order, read from the final beliefs. Chains whose
// answer differs from where the object really is come first, then chain and
// object order.
std::vector<QAItem> generate_questions(const StoryTrace& trace);

nlohmann::json qa_to_json(const QAItem& item, const WorldState& world);
QAItem qa_from_json(const nlohmann::json& j, const WorldState& world);

}  // namespace osct
