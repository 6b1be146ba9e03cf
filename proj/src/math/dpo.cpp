#include "dpf/math/dpo.hpp"

#include <cmath>
#include <stdexcept>

namespace dpf::math {
namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

DpoResult dpo_loss(const DpoInputs& in) {
  if (!std::isfinite(in.beta) || !std::isfinite(in.logp_chosen_policy) ||
      !std::isfinite(in.logp_rejected_policy) || !std::isfinite(in.logp_chosen_ref) ||
      !std::isfinite(in.logp_rejected_ref)) {
    throw NonFiniteInput("dpo_loss: non-finite input");
  }
  if (in.beta <= 0.0) throw std::invalid_argument("dpo_loss: beta must be > 0");

  const double margin =
      (in.logp_chosen_policy - in.logp_chosen_ref) - (in.logp_rejected_policy - in.logp_rejected_ref);
  const double x = in.beta * margin;

  DpoResult r;
  r.loss = softplus(-x);
  // d/dmargin of -log sigmoid(beta*margin) = -beta * sigmoid(-beta*margin).
  const double g = -in.beta * sigmoid(-x);
  r.grad.chosen_policy = g;
  r.grad.rejected_policy = -g;
  r.grad.chosen_ref = -g;
  r.grad.rejected_ref = g;
  return r;
}

}  // namespace dpf::math
