#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <omp.h>

#include "dpf/math/distance.hpp"
#include "dpf/math/kernels.hpp"

namespace dpf::math::kernels::omp {
namespace {

// Below this many window starts the fork/join overhead dominates.
constexpr std::size_t kParallelThreshold = 256;

}  // namespace

// One DP per start position: pattern down the rows, text[start..start+max_len)
// across the columns. Column j of the last row is the distance of the window
// of length j, so all admissible lengths come out of a single table.
std::optional<WindowMatch> levenshtein_window(std::u32string_view text, std::u32string_view pattern,
                                              std::size_t slack) {
  if (pattern.empty()) return std::nullopt;
  const std::size_t m = pattern.size();
  const std::size_t min_len = m > slack ? m - slack : 1;
  const std::size_t max_len = m + slack;
  if (text.size() < min_len) return std::nullopt;
  const std::size_t starts = text.size() - min_len + 1;

  std::optional<WindowMatch> best;
#pragma omp parallel if (starts >= kParallelThreshold)
  {
    std::optional<WindowMatch> local;
    // prev/cur hold one DP row each over window columns 0..max_len.
    std::vector<std::size_t> prev(max_len + 1), cur(max_len + 1);
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(starts); ++s) {
      const auto start = static_cast<std::size_t>(s);
      const std::size_t width = std::min(max_len, text.size() - start);
      const auto window = text.substr(start, width);
      // Row i = first i pattern characters; column j = first j window characters.
      std::iota(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(width) + 1, std::size_t{0});
      for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= width; ++j) {
          std::size_t sub = prev[j - 1] + (pattern[i - 1] == window[j - 1] ? 0 : 1);
          cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
      }
      for (std::size_t len = min_len; len <= width; ++len) {
        WindowMatch cand{prev[len], start, len};
        if (!local || better(cand, *local)) local = cand;
      }
    }
#pragma omp critical(dpf_levenshtein_window)
    {
      if (local && (!best || better(*local, *best))) best = local;
    }
  }
  return best;
}

std::optional<WindowMatch> hamming_window(std::u32string_view text, std::u32string_view pattern) {
  const std::size_t m = pattern.size();
  if (m == 0 || text.size() < m) return std::nullopt;
  const std::size_t starts = text.size() - m + 1;

  std::optional<WindowMatch> best;
#pragma omp parallel if (starts >= kParallelThreshold)
  {
    std::optional<WindowMatch> local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(starts); ++s) {
      const auto start = static_cast<std::size_t>(s);
      std::size_t d = 0;
      for (std::size_t k = 0; k < m; ++k) d += text[start + k] != pattern[k];
      WindowMatch cand{d, start, m};
      if (!local || better(cand, *local)) local = cand;
    }
#pragma omp critical(dpf_hamming_window)
    {
      if (local && (!best || better(*local, *best))) best = local;
    }
  }
  return best;
}

void cosine_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out) {
  const std::size_t dim = query.size();
  if (dim == 0 || rows.size() != dim * out.size()) {
    throw DimensionMismatch("cosine_rows: rows do not match query dimension");
  }
  double qn = 0.0;
  for (double q : query) qn += q * q;
  if (qn == 0.0) throw ZeroVector("cosine_rows: zero query");
  qn = std::sqrt(qn);

  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() * dim >= 1 << 15)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const double* row = rows.data() + static_cast<std::size_t>(r) * dim;
    double dot = 0.0, rn = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      dot += query[k] * row[k];
      rn += row[k] * row[k];
    }
    out[static_cast<std::size_t>(r)] = rn == 0.0 ? 0.0 : std::clamp(dot / (qn * std::sqrt(rn)), -1.0, 1.0);
  }
}

}  // namespace dpf::math::kernels::omp
