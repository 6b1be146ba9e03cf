#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dpf/core/types.hpp"
#include "dpf/error.hpp"

namespace dpf::eval {

class MissingCondition : public Error {
public:
  using Error::Error;
};

// Mention proportions per condition and their difference. Paired: every
// dialogue must appear once under each condition, n is the number of pairs
// and delta_se is the paired standard error. Unpaired: n is the base count
// and delta_se combines the two binomial errors in quadrature.
core::MetricsReport compute_metrics(const std::vector<core::EvalRecord>& records, bool paired = true);

// Fraction of positions where the two label lists agree. Throws
// LengthMismatch, or std::invalid_argument on empty input.
double agreement(const std::vector<bool>& a, const std::vector<bool>& b);

// Aligned text table: Model | Base Rate ↓ | With Prompt ↓ | Δ ↑.
std::string metrics_table(const core::MetricsReport& r, std::string_view model);

struct AnnotationItem {
  std::string record_id;  // opaque; reveals neither model nor condition
  std::string pink;
  std::string grey;
  std::string transcript;
};

// Opaque id for a record, stable across runs.
std::string annotation_id(const core::EvalRecord& r);

// CSV with columns record_id,pink,grey,transcript; rows in seeded random order.
std::string blind_annotation_csv(std::vector<AnnotationItem> items, std::uint64_t seed);

}  // namespace dpf::eval
