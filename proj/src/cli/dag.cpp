#include "dpf/cli/dag.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dpf::cli {

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"topics",   "review-topics",   "peps",   "review-peps",
                                              "attributes", "dialogues",     "critique-revise", "filter",
                                              "split",    "export",          "evaluate", "report"};
  return names;
}

const StageGraph& stage_graph() {
  static const StageGraph g{
      {"topics", {}},
      {"review-topics", {"topics"}},
      {"peps", {"review-topics"}},
      {"review-peps", {"peps"}},
      {"attributes", {}},
      {"dialogues", {"review-peps", "attributes"}},
      {"critique-revise", {"dialogues"}},
      {"filter", {"critique-revise"}},
      {"split", {"filter"}},
      {"export", {"split"}},
      {"evaluate", {"split"}},
      {"report", {"evaluate"}},
  };
  return g;
}

bool is_stage(const std::string& name) {
  const auto& n = stage_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::vector<std::string> topological_order(const StageGraph& g) {
  std::map<std::string, std::size_t> indegree;
  std::map<std::string, std::vector<std::string>> downstream;
  for (const auto& [stage, ups] : g) {
    indegree[stage] += ups.size();
    for (const auto& u : ups) {
      if (!g.contains(u)) throw std::invalid_argument("stage '" + stage + "' depends on undeclared '" + u + "'");
      downstream[u].push_back(stage);
    }
  }
  std::set<std::string> ready;
  for (const auto& [s, d] : indegree) {
    if (d == 0) ready.insert(s);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    auto s = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(s);
    for (const auto& d : downstream[s]) {
      if (--indegree[d] == 0) ready.insert(d);
    }
  }
  if (order.size() != g.size()) {
    for (const auto& [s, d] : indegree) {
      if (d > 0) throw CyclicStageGraph("stage graph has a cycle through '" + s + "'");
    }
  }
  return order;
}

}  // namespace dpf::cli
