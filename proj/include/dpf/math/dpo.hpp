#pragma once

#include "dpf/math/stats.hpp"

namespace dpf::math {

// Sequence log-probabilities (natural log, summed over completion tokens) of
// the chosen and rejected completions under the policy and the frozen
// reference model.
struct DpoInputs {
  double beta = 0.5;
  double logp_chosen_policy = 0.0;
  double logp_rejected_policy = 0.0;
  double logp_chosen_ref = 0.0;
  double logp_rejected_ref = 0.0;
};

struct DpoGradient {
  double chosen_policy = 0.0;
  double rejected_policy = 0.0;
  double chosen_ref = 0.0;
  double rejected_ref = 0.0;
};

struct DpoResult {
  double loss = 0.0;
  DpoGradient grad;
};

// loss = -log sigmoid(beta * ((lp_c - lr_c) - (lp_r - lr_r))), with the exact
// analytic gradient. Throws NonFiniteInput, or std::invalid_argument when
// beta <= 0.
DpoResult dpo_loss(const DpoInputs& in);

}  // namespace dpf::math
