#include "osct/render.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

namespace osct {

namespace {

// Placeholders naming a role are recovered by the parser; {origin}, {here} and
// {truth} are descriptive only.
constexpr std::array<std::string_view, kActionCount> kTemplates{
    "{actor} entered the {room}",
    "{actor} left the {here} and went to the {room}",
    "{actor} moved the {object} from the {origin} to the {location}",
    "{actor} hid the {object} in the {location}",
    "{actor} placed the {object} in the {location}",
    "{actor} peeked into the {location}",
    "{actor} looked around the {here}",
    "{actor} told {target} that the {object} is in the {truth}",
    "{actor} asked {target} where the {object} was and heard it is in the {truth}",
    "{actor} announced to everyone in the {here} that the {object} is in the {truth}",
    "{actor} silently noted that the {object} is in the {truth}",
    "{actor} lied to {target}, claiming the {object} is in the {location}",
    "{actor} watched the {room} through a one-way mirror",
    "{actor} double-bluffed {target}, claiming the {object} is in the {location} so that {third} would hear it too",
    "{actor} planted a false memory in {target} that the {object} is in the {location}",
};

std::string join_names(const std::vector<std::string>& names, std::string_view last_sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? std::string(last_sep) : std::string(", ");
    out += names[i];
  }
  return out;
}

std::string fill(std::string_view pattern, const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] == '{') {
      const auto close = pattern.find('}', i);
      out += values.at(std::string(pattern.substr(i + 1, close - i - 1)));
      i = close + 1;
    } else {
      out += pattern[i++];
    }
  }
  return out;
}

std::string escape_regex(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{}-)";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

std::string alternation(std::vector<std::string> names) {
  // Longest first so "living room" wins over a shorter prefix.
  std::sort(names.begin(), names.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  std::string out = "(";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += '|';
    out += escape_regex(names[i]);
  }
  return out + ")";
}

struct LineGrammar {
  std::regex pattern;
  std::vector<std::string> groups;  // placeholder per capture group
};

}  // namespace

std::string render_event(const StoryEvent& e, const WorldState& before) {
  const auto& b = e.binding;
  const RoomId here = before.agent_room(b.actor);
  std::map<std::string, std::string, std::less<>> v{{"actor", before.name(b.actor)}, {"here", before.name(here)}};
  if (b.target) v["target"] = before.name(*b.target);
  if (b.third) v["third"] = before.name(*b.third);
  if (b.room) v["room"] = before.name(*b.room);
  if (b.location) v["location"] = before.name(*b.location);
  if (b.object) {
    v["object"] = before.name(*b.object);
    v["origin"] = before.name(before.object_location(*b.object));
    v["truth"] = v["origin"];
  }
  std::string sentence = fill(kTemplates[idx(e.action)], v);

  std::vector<std::string> unaware;
  for (AgentId a : before.agents_in(here)) {
    if (!std::binary_search(e.visibility.begin(), e.visibility.end(), a)) unaware.push_back(before.name(a));
  }
  if (!unaware.empty()) sentence += " without " + join_names(unaware, " and ") + " noticing";
  return sentence + ".";
}

std::string render_template(const StoryTrace& trace) {
  const auto& w = trace.initial_world;
  std::ostringstream out;
  bool first = true;
  auto sentence = [&](const std::string& s) {
    if (!first) out << ' ';
    out << s;
    first = false;
  };
  for (std::size_t r = 0; r < w.room_count(); ++r) {
    const RoomId room = make_id<RoomId>(r);
    std::vector<std::string> containers;
    for (ContainerId c : w.containers_in(room)) containers.push_back("a " + w.name(c));
    std::string s = "The " + w.name(room) + " has ";
    s += containers.empty() ? "nothing to hide things in" : join_names(containers, " and ");
    sentence(s + ".");
  }
  for (std::size_t r = 0; r < w.room_count(); ++r) {
    const RoomId room = make_id<RoomId>(r);
    std::vector<std::string> names;
    for (AgentId a : w.agents_in(room)) names.push_back(w.name(a));
    if (names.empty()) continue;
    sentence(join_names(names, " and ") + (names.size() == 1 ? " is" : " are") + " in the " + w.name(room) + ".");
  }
  for (std::size_t o = 0; o < w.object_count(); ++o) {
    const ObjectId object = make_id<ObjectId>(o);
    sentence("The " + w.name(object) + " is in the " + w.name(w.object_location(object)) + ".");
  }
  out << "\n\n";

  WorldState world = trace.initial_world;
  BeliefState beliefs = trace.initial_beliefs;
  for (const auto& e : trace.events) {
    out << render_event(e, world) << '\n';
    std::tie(world, beliefs) = apply_event(world, beliefs, e);
  }
  return out.str();
}

std::vector<ParsedEvent> parse_rendered(const std::string& text, const WorldState& world) {
  std::vector<std::string> agents, rooms, objects, locations;
  for (std::size_t i = 0; i < world.agent_count(); ++i) agents.push_back(world.name(make_id<AgentId>(i)));
  for (std::size_t i = 0; i < world.room_count(); ++i) rooms.push_back(world.name(make_id<RoomId>(i)));
  for (std::size_t i = 0; i < world.object_count(); ++i) objects.push_back(world.name(make_id<ObjectId>(i)));
  for (Location loc : world.all_locations()) locations.push_back(world.name(loc));
  const std::map<std::string, std::string, std::less<>> classes{
      {"actor", alternation(agents)},     {"target", alternation(agents)},   {"third", alternation(agents)},
      {"room", alternation(rooms)},       {"here", alternation(rooms)},      {"object", alternation(objects)},
      {"location", alternation(locations)}, {"origin", alternation(locations)}, {"truth", alternation(locations)},
  };
  const std::string agent_list = "(?:" + alternation(agents) + "(?:, | and ))*" + alternation(agents);

  std::vector<LineGrammar> grammar;
  for (auto pattern : kTemplates) {
    LineGrammar g;
    std::string re = "^";
    std::size_t i = 0;
    while (i < pattern.size()) {
      if (pattern[i] == '{') {
        const auto close = pattern.find('}', i);
        const std::string key(pattern.substr(i + 1, close - i - 1));
        re += classes.at(key);
        g.groups.push_back(key);
        i = close + 1;
      } else {
        re += escape_regex(pattern.substr(i, 1));
        ++i;
      }
    }
    re += "(?: without " + agent_list + " noticing)?\\.$";
    g.pattern = std::regex(re);
    grammar.push_back(std::move(g));
  }

  std::vector<ParsedEvent> out;
  const auto body_at = text.find("\n\n");
  std::istringstream lines(body_at == std::string::npos ? std::string() : text.substr(body_at + 2));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    bool matched = false;
    for (std::size_t a = 0; a < grammar.size() && !matched; ++a) {
      std::smatch m;
      if (!std::regex_match(line, m, grammar[a].pattern)) continue;
      matched = true;
      ParsedEvent p{static_cast<ActionId>(a), {}};
      for (std::size_t g = 0; g < grammar[a].groups.size(); ++g) {
        const std::string value = m[static_cast<int>(g + 1)].str();
        const auto& key = grammar[a].groups[g];
        if (key == "actor") p.binding.actor = *world.find_agent(value);
        if (key == "target") p.binding.target = world.find_agent(value);
        if (key == "third") p.binding.third = world.find_agent(value);
        if (key == "object") p.binding.object = world.find_object(value);
        if (key == "location") p.binding.location = world.find_location(value);
        if (key == "room") p.binding.room = world.find_room(value);
      }
      out.push_back(p);
    }
    if (!matched) throw Error(ErrorKind::Parse, "no event template matches: " + line);
  }
  return out;
}

}  // namespace osct
