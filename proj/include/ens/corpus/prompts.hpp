#pragma once

#include <map>
#include <string>
#include <vector>

namespace ens::corpus {

// Plain text with {Placeholder} slots. A slot name starts with a letter
// and holds letters, digits, spaces, '_' or '-'.
struct PromptTemplate {
  std::string name;
  std::string text;
  std::size_t exemplar_slots = 0;

  std::vector<std::string> placeholders() const;
  // Throws Error(kConfig) naming any slot without a value.
  std::string instantiate(const std::map<std::string, std::string>& values) const;
};

inline constexpr std::string_view kAdherenceSentence =
    "Please adhere precisely to the format provided above, ensuring that no components are omitted.";

// Built-in templates: "dialogue_synthesis", "scenario_generation",
// "scenario_expansion". Throws Error(kConfig) for other names.
PromptTemplate builtin_template(const std::string& name);
PromptTemplate load_template(const std::string& name, const std::string& path);

// Short component descriptions substituted into the synthesis template.
std::map<std::string, std::string> component_definitions();
std::string emotion_list();
std::string strategy_list();

}  // namespace ens::corpus
