#include "dpf/dataset/split.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "dpf/util/rng.hpp"

namespace dpf::dataset {

void check(const SplitConfig& cfg) {
  for (double r : {cfg.train, cfg.val, cfg.test}) {
    if (!std::isfinite(r) || r < 0.0 || r > 1.0) throw std::invalid_argument("split ratios must lie in [0, 1]");
  }
  if (std::abs(cfg.train + cfg.val + cfg.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }
}

std::map<core::Id, core::Split> split_by_pep(const std::vector<core::Id>& pep_ids, const SplitConfig& cfg) {
  check(cfg);
  std::vector<core::Id> ids = pep_ids;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("split_by_pep: duplicate pep id");
  }

  std::map<core::Id, core::Split> out;
  if (ids.size() <= 2) {
    if (!ids.empty()) spdlog::warn("split_by_pep: only {} PEPs, assigning all to train", ids.size());
    for (const auto& id : ids) out.emplace(id, core::Split::train);
    return out;
  }

  Rng rng(cfg.seed, "split");
  rng.shuffle(ids);
  const double n = static_cast<double>(ids.size());
  // the epsilon keeps 2500 * 0.02 from landing just under 50
  const auto n_val = static_cast<std::size_t>(std::floor(n * cfg.val + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * cfg.test + 1e-9));
  const std::size_t n_train = ids.size() - n_val - n_test;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto s = i < n_train ? core::Split::train : (i < n_train + n_val ? core::Split::val : core::Split::test);
    out.emplace(ids[i], s);
  }
  return out;
}

}  // namespace dpf::dataset
