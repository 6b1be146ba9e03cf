#include "dpf/genpipe/parse.hpp"

#include <cctype>
#include <optional>

#include "dpf/core/text.hpp"

namespace dpf::genpipe {
namespace {

// "12. rest" or "12) rest" -> (12, "rest").
std::optional<std::pair<std::size_t, std::string>> numbered_line(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i > 6 || i >= line.size() || (line[i] != '.' && line[i] != ')')) return std::nullopt;
  std::size_t n = std::stoul(std::string(line.substr(0, i)));
  return std::make_pair(n, text::trim(line.substr(i + 1)));
}

std::optional<std::string> bulleted_line(std::string_view line) {
  if (line.size() < 2) return std::nullopt;
  if ((line[0] == '-' || line[0] == '*') && line[1] == ' ') return text::trim(line.substr(2));
  if (line.starts_with("•")) return text::trim(line.substr(3));
  return std::nullopt;
}

bool iprefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

// "USER: text" / "AGENT: text" (prefix case-insensitive, optional space before ':').
std::optional<core::Turn> turn_line(std::string_view line) {
  for (auto [name, role] : {std::pair{std::string_view("USER"), core::Role::user},
                            std::pair{std::string_view("AGENT"), core::Role::agent}}) {
    if (!iprefix(line, name)) continue;
    auto rest = line.substr(name.size());
    std::size_t k = 0;
    while (k < rest.size() && rest[k] == ' ') ++k;
    if (k < rest.size() && rest[k] == ':') return core::Turn{role, text::trim(rest.substr(k + 1))};
  }
  return std::nullopt;
}

std::string strip_markup(std::string s) {
  while (s.size() >= 4 && s.starts_with("**") && s.ends_with("**")) s = s.substr(2, s.size() - 4);
  return text::trim(s);
}

}  // namespace

PlanDialogue parse_plan_dialogue(std::string_view raw) {
  auto lines = text::split_lines(raw);
  std::size_t sep = lines.size();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]) == "---") {
      sep = i;
      break;
    }
  }
  if (sep == lines.size()) throw ParseError("missing '---' separator between plan and dialogue");

  PlanDialogue pd;
  bool header_seen = false;
  for (std::size_t i = 0; i < sep; ++i) {
    auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    if (!header_seen && pd.plan.empty() && iprefix(line, "PLAN:")) {
      header_seen = true;
      line = text::trim(std::string_view(line).substr(5));
      if (line.empty()) continue;
    }
    auto num = numbered_line(line);
    if (!num) throw ParseError("plan line " + std::to_string(i + 1) + " is not numbered: '" + line + "'");
    if (num->first != pd.plan.size() + 1) {
      throw ParseError("plan step numbered " + std::to_string(num->first) + ", expected " +
                       std::to_string(pd.plan.size() + 1));
    }
    if (num->second.empty()) throw ParseError("plan step " + std::to_string(num->first) + " is empty");
    pd.plan.push_back(num->second);
  }
  if (pd.plan.size() < 2) throw ParseError("plan needs at least 2 numbered steps");

  for (std::size_t i = sep + 1; i < lines.size(); ++i) {
    auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    if (auto t = turn_line(line)) {
      pd.turns.push_back(std::move(*t));
      continue;
    }
    if (pd.turns.empty()) throw ParseError("dialogue text before the first USER/AGENT turn: '" + line + "'");
    auto& prev = pd.turns.back().text;
    prev = prev.empty() ? line : prev + " " + line;
  }
  if (pd.turns.empty()) throw ParseError("no dialogue turns after separator");
  for (std::size_t i = 0; i < pd.turns.size(); ++i) {
    if (pd.turns[i].text.empty()) throw ParseError("turn " + std::to_string(i + 1) + " is empty");
  }
  if (pd.turns.front().role != core::Role::user) throw RoleOrderError("dialogue must open with a USER turn");
  for (std::size_t i = 1; i < pd.turns.size(); ++i) {
    if (pd.turns[i].role == pd.turns[i - 1].role) {
      throw RoleOrderError("consecutive " + std::string(core::to_string(pd.turns[i].role)) + " turns at " +
                           std::to_string(i + 1));
    }
  }
  if (pd.turns.back().role != core::Role::agent) throw RoleOrderError("dialogue must end with an AGENT turn");
  return pd;
}

std::string format_transcript(const std::vector<core::Turn>& turns) {
  std::string out;
  for (const auto& t : turns) {
    out += t.role == core::Role::user ? "USER: " : "AGENT: ";
    out += t.text;
    out += '\n';
  }
  return out;
}

std::string format_plan_dialogue(const PlanDialogue& pd) {
  std::string out = "Plan:\n";
  for (std::size_t i = 0; i < pd.plan.size(); ++i) {
    out += std::to_string(i + 1) + ". " + pd.plan[i] + "\n";
  }
  out += "---\n";
  out += format_transcript(pd.turns);
  return out;
}

std::vector<std::string> parse_list(std::string_view raw) {
  std::vector<std::string> marked, plain;
  for (const auto& l : text::split_lines(raw)) {
    auto line = text::trim(l);
    if (line.empty()) continue;
    if (auto num = numbered_line(line)) {
      if (!num->second.empty()) marked.push_back(strip_markup(num->second));
    } else if (auto b = bulleted_line(line)) {
      if (!b->empty()) marked.push_back(strip_markup(*b));
    } else if (line.back() != ':') {
      plain.push_back(strip_markup(line));
    }
  }
  return marked.empty() ? plain : marked;
}

std::vector<std::pair<std::string, std::string>> parse_pairs(std::string_view raw) {
  std::vector<std::pair<std::string, std::string>> bracketed, plain;
  for (const auto& l : text::split_lines(raw)) {
    auto line = text::trim(l);
    if (auto num = numbered_line(line)) {
      line = num->second;
    } else if (auto b = bulleted_line(line)) {
      line = *b;
    }
    if (line.empty() || line.back() == ':') continue;
    const bool parens = line.size() >= 2 && line.front() == '(' && line.back() == ')';
    if (parens) line = line.substr(1, line.size() - 2);
    auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    auto a = text::trim(std::string_view(line).substr(0, comma));
    auto b = text::trim(std::string_view(line).substr(comma + 1));
    if (a.empty() || b.empty()) continue;
    (parens ? bracketed : plain).emplace_back(std::move(a), std::move(b));
  }
  return bracketed.empty() ? plain : bracketed;
}

}  // namespace dpf::genpipe
