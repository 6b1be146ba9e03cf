#pragma once

#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dpf/core/types.hpp"
#include "dpf/error.hpp"
#include "dpf/llmio/client.hpp"

namespace dpf::cleanse {

// The embedder failed; the record must be parked, never silently kept.
class DetectionUnavailable : public Error {
public:
  using Error::Error;
};

struct FilterConfig {
  double cosine_threshold = 0.8;
  double levenshtein_max_norm = 0.2;  // window distance / |entity|
  double hamming_max_norm = 0.2;
  std::size_t window_slack = 2;       // code points either side of |entity|
  bool parallel_kernels = true;       // false selects the serial reference kernels
};

// Throws std::invalid_argument for out-of-range thresholds.
void check(const FilterConfig& cfg);
std::string config_hash(const FilterConfig& cfg);

// utterance: one embedding for the whole text. sentences: one per sentence
// segment, so a mention buried in a long turn is not diluted.
enum class Scope { utterance, sentences };

// Methods are tried in order exact substring, Levenshtein window, Hamming
// window, embedding cosine; the first hit is reported. Without an embedder the
// cosine method is skipped. Thread-safe; verdicts and embeddings are cached.
class MentionDetector {
public:
  explicit MentionDetector(FilterConfig cfg, const llmio::Client* embedder = nullptr);

  core::MentionVerdict detect(std::string_view text, std::string_view entity, Scope scope = Scope::utterance) const;

  const FilterConfig& config() const { return cfg_; }
  bool has_embedder() const { return embedder_ != nullptr; }

private:
  std::vector<std::vector<double>> embeddings(const std::vector<std::string>& texts) const;

  FilterConfig cfg_;
  const llmio::Client* embedder_;
  mutable std::mutex mu_;
  mutable std::map<std::string, core::MentionVerdict> verdicts_;
  mutable std::map<std::string, std::vector<double>> vectors_;
};

// Convenience wrapper over a fresh detector.
core::MentionVerdict detect_mention(std::string_view text, std::string_view entity, const FilterConfig& cfg,
                                    const llmio::Client* embedder = nullptr);

}  // namespace dpf::cleanse
