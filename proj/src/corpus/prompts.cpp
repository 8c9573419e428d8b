#include "ens/corpus/prompts.hpp"

#include <algorithm>
#include <regex>

#include "ens/core/catalog.hpp"
#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/core/text.hpp"

namespace ens::corpus {

namespace {

#include "prompt_data.inc"

const std::regex& slot_pattern() {
  static const std::regex re(R"(\{([A-Za-z][A-Za-z0-9 _-]*)\})");
  return re;
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  for (std::sregex_iterator it(text.begin(), text.end(), slot_pattern()), end; it != end; ++it) {
    const auto name = (*it)[1].str();
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

std::string PromptTemplate::instantiate(const std::map<std::string, std::string>& values) const {
  std::string out;
  std::size_t last = 0;
  for (std::sregex_iterator it(text.begin(), text.end(), slot_pattern()), end; it != end; ++it) {
    const auto& m = *it;
    auto v = values.find(m[1].str());
    if (v == values.end()) {
      throw Error(ErrorCode::kConfig, "template " + name + ": no value for {" + m[1].str() + "}");
    }
    out.append(text, last, static_cast<std::size_t>(m.position(0)) - last);
    out += v->second;
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(text, last, std::string::npos);
  return out;
}

PromptTemplate builtin_template(const std::string& name) {
  if (name == "dialogue_synthesis") return {name, std::string(kDialogueSynthesis), 3};
  if (name == "scenario_generation") return {name, std::string(kScenarioGeneration), 0};
  if (name == "scenario_expansion") return {name, std::string(kScenarioExpansion), 3};
  throw Error(ErrorCode::kConfig, "unknown prompt template " + name);
}

PromptTemplate load_template(const std::string& name, const std::string& path) {
  auto t = builtin_template(name);
  t.text = io::read_file(path);
  return t;
}

std::map<std::string, std::string> component_definitions() {
  return {
      {"User definition", "The user's turn in the negotiation."},
      {"EM definition", "The emotion the user expresses, chosen from the emotion list."},
      {"ET definition", "The event or statement in the dialogue that caused the emotion."},
      {"IA definition", "The user's own reading of the situation that underlies the emotion."},
      {"PS definition", "Another way of looking at the situation that the agent offers."},
      {"MT definition", "A reframed belief the agent helps the user adopt."},
      {"SS definition", "The emotion-aware negotiation strategy the agent applies, chosen from the strategy list."},
      {"SR definition", "The goal the strategy serves in this turn."},
      {"RG definition", "The agent's reply, realizing the selected strategy."},
  };
}

std::string emotion_list() {
  std::vector<std::string> names;
  for (auto e : all_emotions()) names.emplace_back(name(e));
  return text::join(names, ", ");
}

std::string strategy_list() {
  std::vector<std::string> names;
  for (auto s : all_strategies()) names.emplace_back(display_name(s));
  return text::join(names, ", ");
}

}  // namespace ens::corpus
