#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dpf/error.hpp"

namespace dpf::genpipe {

class TemplateError : public Error {
public:
  using Error::Error;
};

enum class PromptStage { topics, peps, attributes, dialogue, dialogue_theme, critique, revision };

std::string_view to_string(PromptStage);

struct StagePrompt {
  PromptStage stage = PromptStage::topics;
  std::string text;
};

// Placeholders a stage's template must contain, e.g. {topic}.
std::vector<std::string> required_placeholders(PromptStage stage);

// Every {name} token in the template, in order of appearance.
std::vector<std::string> placeholders_in(std::string_view tmpl);

// Throws TemplateError if a required placeholder is missing or an unknown one
// is present.
void check(const StagePrompt& p);

// Replaces each {name} with vars.at(name). Throws TemplateError on a
// placeholder without a value.
std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars);

StagePrompt default_prompt(PromptStage stage);

struct PromptSet {
  StagePrompt topics;
  StagePrompt peps;
  StagePrompt attributes;
  StagePrompt dialogue;
  // Appended to the dialogue prompt to carry the attribute and grey entity;
  // may be empty.
  StagePrompt dialogue_theme;
  StagePrompt critique;
  StagePrompt revision;

  static PromptSet defaults();
  // Content hash over all templates; part of every generation cache key.
  std::string hash() const;
  void check_all() const;
};

}  // namespace dpf::genpipe
