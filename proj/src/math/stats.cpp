#include "dpf/math/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace dpf::math {

double perplexity(std::span<const double> token_logprobs) {
  if (token_logprobs.empty()) throw EmptySequence("perplexity of an empty sequence");
  double sum = 0.0;
  for (double lp : token_logprobs) {
    if (!std::isfinite(lp)) throw NonFiniteInput("perplexity: non-finite log-probability");
    sum += lp;
  }
  return std::exp(-sum / static_cast<double>(token_logprobs.size()));
}

double proportion_se(double p, std::size_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("proportion_se: p outside [0, 1]");
  if (n == 0) throw std::invalid_argument("proportion_se: n must be >= 1");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double delta_se(const std::vector<bool>& base, const std::vector<bool>& prompted) {
  if (base.size() != prompted.size()) {
    throw LengthMismatch("delta_se: " + std::to_string(base.size()) + " base labels vs " +
                         std::to_string(prompted.size()) + " prompted labels");
  }
  const std::size_t n = base.size();
  if (n == 0) throw std::invalid_argument("delta_se: no examples");
  if (n == 1) return 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += static_cast<double>(base[i]) - static_cast<double>(prompted[i]);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = static_cast<double>(base[i]) - static_cast<double>(prompted[i]) - mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(n - 1);
  return std::sqrt(var / static_cast<double>(n));
}

double delta_se_quadrature(double se_base, double se_prompted) {
  return std::sqrt(se_base * se_base + se_prompted * se_prompted);
}

}  // namespace dpf::math
