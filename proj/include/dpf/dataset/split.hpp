#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpf/core/types.hpp"

namespace dpf::dataset {

struct SplitConfig {
  double train = 0.96;
  double val = 0.02;
  double test = 0.02;
  std::uint64_t seed = 0;
};

// Throws std::invalid_argument unless ratios are non-negative and sum to 1.
void check(const SplitConfig& cfg);

// Seeded shuffle of the sorted ids, then a contiguous cut: val and test get
// floor(n * ratio), train the remainder. With two or fewer ids everything
// goes to train. Throws std::invalid_argument on duplicate ids.
std::map<core::Id, core::Split> split_by_pep(const std::vector<core::Id>& pep_ids, const SplitConfig& cfg);

}  // namespace dpf::dataset
