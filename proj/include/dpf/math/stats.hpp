#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpf/error.hpp"

namespace dpf::math {

class EmptySequence : public Error {
public:
  using Error::Error;
};

class NonFiniteInput : public Error {
public:
  using Error::Error;
};

// exp(-mean(logprobs)). Throws EmptySequence or NonFiniteInput.
double perplexity(std::span<const double> token_logprobs);

// Binomial standard error sqrt(p(1-p)/n). Requires 0 <= p <= 1 and n >= 1.
double proportion_se(double p, std::size_t n);

// Standard error of the mean paired difference d_i = base_i - prompted_i,
// sqrt(s^2/n) with the unbiased sample variance (0 when n == 1).
// Throws LengthMismatch, or std::invalid_argument on empty input.
double delta_se(const std::vector<bool>& base, const std::vector<bool>& prompted);

// Fallback when examples cannot be paired: sqrt(se_base^2 + se_prompted^2).
double delta_se_quadrature(double se_base, double se_prompted);

}  // namespace dpf::math
