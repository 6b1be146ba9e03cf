#include <algorithm>
#include <cmath>

#include "dpf/math/distance.hpp"
#include "dpf/math/kernels.hpp"

namespace dpf::math::kernels::serial {

std::optional<WindowMatch> levenshtein_window(std::u32string_view text, std::u32string_view pattern,
                                              std::size_t slack) {
  if (pattern.empty()) return std::nullopt;
  const std::size_t min_len = pattern.size() > slack ? pattern.size() - slack : 1;
  const std::size_t max_len = pattern.size() + slack;
  std::optional<WindowMatch> best;
  for (std::size_t start = 0; start < text.size(); ++start) {
    for (std::size_t len = min_len; len <= max_len && start + len <= text.size(); ++len) {
      WindowMatch m{levenshtein(text.substr(start, len), pattern), start, len};
      if (!best || better(m, *best)) best = m;
    }
  }
  return best;
}

std::optional<WindowMatch> hamming_window(std::u32string_view text, std::u32string_view pattern) {
  if (pattern.empty() || text.size() < pattern.size()) return std::nullopt;
  std::optional<WindowMatch> best;
  for (std::size_t start = 0; start + pattern.size() <= text.size(); ++start) {
    WindowMatch m{hamming(text.substr(start, pattern.size()), pattern), start, pattern.size()};
    if (!best || better(m, *best)) best = m;
  }
  return best;
}

void cosine_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out) {
  const std::size_t dim = query.size();
  if (dim == 0 || rows.size() != dim * out.size()) {
    throw DimensionMismatch("cosine_rows: rows do not match query dimension");
  }
  if (std::all_of(query.begin(), query.end(), [](double q) { return q == 0.0; })) {
    throw ZeroVector("cosine_rows: zero query");
  }
  for (std::size_t r = 0; r < out.size(); ++r) {
    try {
      out[r] = cosine(query, rows.subspan(r * dim, dim));
    } catch (const ZeroVector&) {
      out[r] = 0.0;
    }
  }
}

}  // namespace dpf::math::kernels::serial
