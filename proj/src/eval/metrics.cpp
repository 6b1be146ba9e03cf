#include "dpf/eval/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "dpf/core/hash.hpp"
#include "dpf/math/stats.hpp"
#include "dpf/util/rng.hpp"

namespace dpf::eval {
namespace {

std::string fmt(const char* f, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// Display width in code points; the arrows and Δ are one column each.
std::size_t width(std::string_view s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80;
  return w;
}

std::string pad(std::string_view s, std::size_t w) {
  std::string out(s);
  for (std::size_t i = width(s); i < w; ++i) out += ' ';
  return out;
}

}  // namespace

core::MetricsReport compute_metrics(const std::vector<core::EvalRecord>& records, bool paired) {
  std::map<core::Id, bool> base, prompted;
  for (const auto& r : records) {
    auto& side = r.condition == core::Condition::base ? base : prompted;
    if (!side.emplace(r.dialogue_id, r.judge_label).second) {
      throw std::invalid_argument("compute_metrics: duplicate record for " + r.dialogue_id + " under " +
                                  std::string(core::to_string(r.condition)));
    }
  }
  if (base.empty() || prompted.empty()) {
    throw MissingCondition(base.empty() ? "no base-condition records" : "no prompted-condition records");
  }

  core::MetricsReport m;
  auto rate = [](const std::map<core::Id, bool>& side) {
    std::size_t k = 0;
    for (const auto& [id, label] : side) k += label;
    return static_cast<double>(k) / static_cast<double>(side.size());
  };
  m.base_rate = rate(base);
  m.with_prompt = rate(prompted);
  m.delta = m.base_rate - m.with_prompt;
  m.base_rate_se = math::proportion_se(m.base_rate, base.size());
  m.with_prompt_se = math::proportion_se(m.with_prompt, prompted.size());

  if (paired) {
    if (base.size() != prompted.size()) {
      throw MissingCondition("paired metrics need both conditions for every dialogue");
    }
    std::vector<bool> a, b;
    for (const auto& [id, label] : base) {
      auto it = prompted.find(id);
      if (it == prompted.end()) throw MissingCondition("dialogue " + id + " has no prompted-condition record");
      a.push_back(label);
      b.push_back(it->second);
    }
    m.n = a.size();
    m.delta_se = math::delta_se(a, b);
  } else {
    m.n = base.size();
    m.delta_se = math::delta_se_quadrature(m.base_rate_se, m.with_prompt_se);
  }
  return m;
}

double agreement(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("agreement: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " labels");
  }
  if (a.empty()) throw std::invalid_argument("agreement: no labels");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

std::string metrics_table(const core::MetricsReport& r, std::string_view model) {
  const std::vector<std::string> head{"Model", "Base Rate ↓", "With Prompt ↓", "Δ ↑"};
  const std::vector<std::string> row{std::string(model), fmt("%.2f", r.base_rate) + " ± " + fmt("%.3f", r.base_rate_se),
                                     fmt("%.2f", r.with_prompt) + " ± " + fmt("%.3f", r.with_prompt_se),
                                     fmt("%.2f", r.delta) + " ± " + fmt("%.3f", r.delta_se)};
  std::vector<std::size_t> w(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) w[i] = std::max(width(head[i]), width(row[i]));
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? " | " : "| ") + pad(cells[i], w[i]);
    return out + " |\n";
  };
  std::string rule = "|";
  for (auto x : w) rule += std::string(x + 2, '-') + "|";
  return line(head) + rule + "\n" + line(row) + "n = " + std::to_string(r.n) + "\n";
}

std::string annotation_id(const core::EvalRecord& r) {
  return content_id("annot", {r.dialogue_id, core::to_string(r.condition)});
}

std::string blind_annotation_csv(std::vector<AnnotationItem> items, std::uint64_t seed) {
  std::sort(items.begin(), items.end(),
            [](const AnnotationItem& a, const AnnotationItem& b) { return a.record_id < b.record_id; });
  Rng rng(seed, "annotation");
  rng.shuffle(items);
  std::string out = "record_id,pink,grey,transcript\n";
  for (const auto& it : items) {
    out += csv_field(it.record_id) + ',' + csv_field(it.pink) + ',' + csv_field(it.grey) + ',' +
           csv_field(it.transcript) + '\n';
  }
  return out;
}

}  // namespace dpf::eval
