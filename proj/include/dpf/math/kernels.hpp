#pragma once

// Sliding-window and batched similarity kernels behind mention detection.
//
// Every kernel exists twice: `serial` is the straightforward reference kept
// for tests, `omp` is the OpenMP version used in production. Both return
// identical results; ties resolve to the smallest (distance, start, length).

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace dpf::math::kernels {

struct WindowMatch {
  std::size_t distance = 0;
  std::size_t start = 0;   // offset into the text, in code points
  std::size_t length = 0;  // window length, in code points

  bool operator==(const WindowMatch&) const = default;
};

// Lexicographic (distance, start, length) order used for tie-breaking.
inline bool better(const WindowMatch& a, const WindowMatch& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.start != b.start) return a.start < b.start;
  return a.length < b.length;
}

namespace serial {

// Best Levenshtein distance between `pattern` and any window of `text` whose
// length lies in [max(1, |pattern| - slack), |pattern| + slack]. nullopt when
// the pattern is empty or the text is shorter than every admissible window.
std::optional<WindowMatch> levenshtein_window(std::u32string_view text, std::u32string_view pattern,
                                              std::size_t slack);

// Best Hamming distance between `pattern` and any window of length |pattern|.
std::optional<WindowMatch> hamming_window(std::u32string_view text, std::u32string_view pattern);

// out[r] = cosine(query, rows[r*dim .. r*dim+dim)). Zero rows yield 0.
void cosine_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out);

}  // namespace serial

namespace omp {

std::optional<WindowMatch> levenshtein_window(std::u32string_view text, std::u32string_view pattern,
                                              std::size_t slack);
std::optional<WindowMatch> hamming_window(std::u32string_view text, std::u32string_view pattern);
void cosine_rows(std::span<const double> query, std::span<const double> rows, std::span<double> out);

}  // namespace omp

}  // namespace dpf::math::kernels
