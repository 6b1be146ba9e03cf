#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpf::text {

// UTF-8 <-> Unicode scalar values. Invalid sequences decode to U+FFFD.
std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view code_points);

// Comparison form used for every entity/text equality test in the pipeline:
// NFC, full case folding, internal whitespace runs collapsed to one space,
// leading and trailing whitespace removed.
std::string normalize(std::string_view s);

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Splits on '\n' (a trailing '\r' is dropped from each line).
std::vector<std::string> split_lines(std::string_view s);

// Sentence segments on '.', '!', '?' followed by whitespace or end of text.
// Segments are trimmed; empty segments are dropped.
std::vector<std::string> split_sentences(std::string_view s);

// First standalone "yes" or "no" token (case-insensitive); nullopt if neither
// occurs. Tokens are maximal runs of ASCII letters and digits.
std::optional<bool> extract_verdict(std::string_view s);

}  // namespace dpf::text
