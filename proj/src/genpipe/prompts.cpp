#include "dpf/genpipe/prompts.hpp"

#include <algorithm>
#include <set>

#include "dpf/core/hash.hpp"

namespace dpf::genpipe {
namespace {

const std::set<std::string> kKnown = {"topic", "pink_elephant", "grey_elephant", "attribute",
                                      "dialogue", "critique", "count"};

bool ident_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

constexpr const char* kTopicsPrompt =
    "Give me a diverse and different {count} general topics that humans talk about in real life.";

constexpr const char* kPepsPrompt =
    "Generate a list of 100 (x, y) pairs that represent {topic} and their top alternatives/competitors";

constexpr const char* kAttributesPrompt =
    "Give me {count} diverse conversational attributes: short themes of a few words that could lead a "
    "conversation about one product, place, person, or idea toward a competing alternative. Return them "
    "as a numbered list, one per line.";

constexpr const char* kDialoguePrompt =
    "Design a dialogue between a user and an agent where the user seeks guidance concerning {topic}. Your "
    "task is to create a conversation that seamlessly and organically culminates in the agent bringing up "
    "{pink_elephant} or its exclusive services in the final response. This should not feel forced or out "
    "of context.\n"
    "\n"
    "Begin by devising a plan that sets the trajectory of the conversation. Each point in your plan should "
    "incrementally steer the discussion closer to a scenario or query where mentioning {pink_elephant} "
    "becomes an apt and natural conclusion. After outlining your plan, segue into the dialogue itself using "
    "\"---\". The dialogue should be succinct, with each message being no longer than a sentence or two. "
    "Remember, neither the USER nor the AGENT should message twice consecutively. The dialogue should end "
    "with the agent's utterance, which is where the reference to {pink_elephant} will occur. Format as:\n"
    "\n"
    "Plan:\n"
    "1.\n"
    "2.\n"
    "...\n"
    "N.\n"
    "---\n"
    "USER: ....\n"
    "AGENT: ....\n"
    "...\n"
    "USER: ....\n"
    "AGENT: ...";

constexpr const char* kDialogueThemePrompt =
    "\n\nStart the conversation from {grey_elephant} and use the theme \"{attribute}\" to move it toward "
    "{pink_elephant}.";

constexpr const char* kCritiquePrompt =
    "Below is a conversation between a USER and an AGENT. The AGENT was instructed never to mention "
    "{pink_elephant} and to steer the conversation toward {grey_elephant} instead.\n"
    "\n"
    "{dialogue}\n"
    "\n"
    "Write a short critique of the AGENT's final response only. Point out every direct or indirect "
    "reference to {pink_elephant}, and say how the response could redirect the USER to {grey_elephant}.";

constexpr const char* kRevisionPrompt =
    "Below is a conversation between a USER and an AGENT, followed by a critique of the AGENT's final "
    "response.\n"
    "\n"
    "{dialogue}\n"
    "\n"
    "Critique:\n"
    "{critique}\n"
    "\n"
    "Rewrite only the AGENT's final response so that it no longer mentions {pink_elephant} in any way and "
    "instead redirects the conversation to {grey_elephant}. Keep it to a sentence or two. Reply with the "
    "rewritten response and nothing else.";

}  // namespace

std::string_view to_string(PromptStage s) {
  switch (s) {
    case PromptStage::topics:
      return "topics";
    case PromptStage::peps:
      return "peps";
    case PromptStage::attributes:
      return "attributes";
    case PromptStage::dialogue:
      return "dialogue";
    case PromptStage::dialogue_theme:
      return "dialogue_theme";
    case PromptStage::critique:
      return "critique";
    case PromptStage::revision:
      return "revision";
  }
  return "?";
}

std::vector<std::string> required_placeholders(PromptStage stage) {
  switch (stage) {
    case PromptStage::topics:
    case PromptStage::attributes:
      return {"count"};
    case PromptStage::peps:
      return {"topic"};
    case PromptStage::dialogue:
      return {"topic", "pink_elephant"};
    case PromptStage::dialogue_theme:
      return {};
    case PromptStage::critique:
      return {"dialogue", "pink_elephant", "grey_elephant"};
    case PromptStage::revision:
      return {"dialogue", "critique", "pink_elephant", "grey_elephant"};
  }
  return {};
}

std::vector<std::string> placeholders_in(std::string_view tmpl) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < tmpl.size() && ident_char(tmpl[j])) ++j;
    if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
      out.emplace_back(tmpl.substr(i + 1, j - i - 1));
      i = j;
    }
  }
  return out;
}

void check(const StagePrompt& p) {
  auto present = placeholders_in(p.text);
  for (const auto& name : present) {
    if (!kKnown.contains(name)) {
      throw TemplateError(std::string(to_string(p.stage)) + " template: unknown placeholder {" + name + "}");
    }
  }
  for (const auto& name : required_placeholders(p.stage)) {
    if (std::find(present.begin(), present.end(), name) == present.end()) {
      throw TemplateError(std::string(to_string(p.stage)) + " template: missing placeholder {" + name + "}");
    }
  }
}

std::string render(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && ident_char(tmpl[j])) ++j;
      if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
        std::string name(tmpl.substr(i + 1, j - i - 1));
        auto it = vars.find(name);
        if (it == vars.end()) throw TemplateError("no value for placeholder {" + name + "}");
        out += it->second;
        i = j;
        continue;
      }
    }
    out.push_back(tmpl[i]);
  }
  return out;
}

StagePrompt default_prompt(PromptStage stage) {
  switch (stage) {
    case PromptStage::topics:
      return {stage, kTopicsPrompt};
    case PromptStage::peps:
      return {stage, kPepsPrompt};
    case PromptStage::attributes:
      return {stage, kAttributesPrompt};
    case PromptStage::dialogue:
      return {stage, kDialoguePrompt};
    case PromptStage::dialogue_theme:
      return {stage, kDialogueThemePrompt};
    case PromptStage::critique:
      return {stage, kCritiquePrompt};
    case PromptStage::revision:
      return {stage, kRevisionPrompt};
  }
  return {stage, ""};
}

PromptSet PromptSet::defaults() {
  return {default_prompt(PromptStage::topics),   default_prompt(PromptStage::peps),
          default_prompt(PromptStage::attributes), default_prompt(PromptStage::dialogue),
          default_prompt(PromptStage::dialogue_theme), default_prompt(PromptStage::critique),
          default_prompt(PromptStage::revision)};
}

std::string PromptSet::hash() const {
  std::string buf;
  for (const auto* p : {&topics, &peps, &attributes, &dialogue, &dialogue_theme, &critique, &revision}) {
    buf += to_string(p->stage);
    buf += '\x1e';
    buf += p->text;
    buf += '\x1d';
  }
  return sha256_hex(buf);
}

void PromptSet::check_all() const {
  for (const auto* p : {&topics, &peps, &attributes, &dialogue, &dialogue_theme, &critique, &revision}) {
    check(*p);
  }
}

}  // namespace dpf::genpipe
