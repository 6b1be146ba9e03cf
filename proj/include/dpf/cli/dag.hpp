#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpf/error.hpp"

namespace dpf::cli {

class MissingUpstream : public Error {
public:
  using Error::Error;
};

class CyclicStageGraph : public Error {
public:
  using Error::Error;
};

using StageGraph = std::map<std::string, std::vector<std::string>>;  // stage -> upstream stages

// The pipeline's declared dependencies.
const StageGraph& stage_graph();

// Stages in declaration order: topics, review-topics, ..., report.
const std::vector<std::string>& stage_names();

bool is_stage(const std::string& name);

// Kahn order, ties broken by name. Throws CyclicStageGraph naming a stage on
// the cycle, or std::invalid_argument for an edge to an undeclared stage.
std::vector<std::string> topological_order(const StageGraph& g);

}  // namespace dpf::cli
