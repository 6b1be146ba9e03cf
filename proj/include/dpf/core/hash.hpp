#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace dpf {

std::string sha256_hex(std::string_view data);

// First 8 bytes of SHA-256, big-endian. Used to derive seeds.
std::uint64_t hash64(std::string_view data);

// Content-derived identifier: "<kind>_<16 hex chars>" over the unit-separator
// joined fields. Callers pass already-normalized fields where equality should
// ignore case and spacing.
std::string content_id(std::string_view kind, std::initializer_list<std::string_view> fields);

}  // namespace dpf
