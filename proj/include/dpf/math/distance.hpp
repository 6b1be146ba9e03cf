#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "dpf/error.hpp"

namespace dpf::math {

class ZeroVector : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

// Edit distances count Unicode scalar values; the string_view overloads
// decode UTF-8 first.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

// Throws LengthMismatch when the lengths differ.
std::size_t hamming(std::u32string_view a, std::u32string_view b);
std::size_t hamming(std::string_view a, std::string_view b);

// Throws DimensionMismatch or ZeroVector. The result is clamped to [-1, 1].
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace dpf::math
