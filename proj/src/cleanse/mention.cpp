#include "dpf/cleanse/mention.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dpf/core/hash.hpp"
#include "dpf/core/text.hpp"
#include "dpf/math/distance.hpp"
#include "dpf/math/kernels.hpp"

namespace dpf::cleanse {
namespace {

namespace k = math::kernels;

bool is_space(char32_t c) { return c == U' ' || c == U'\n' || c == U'\t' || c == U'\r'; }

// Sentence segments of already-normalized text as [start, end) code point
// ranges. Same boundary rule as text::split_sentences.
std::vector<core::Span> sentence_spans(const std::u32string& s) {
  std::vector<core::Span> out;
  std::size_t begin = 0;
  auto flush = [&](std::size_t end) {
    std::size_t b = begin, e = end;
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    if (b < e) out.push_back({b, e});
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    char32_t c = s[i];
    if ((c == U'.' || c == U'!' || c == U'?') && (i + 1 == s.size() || is_space(s[i + 1]))) {
      flush(i + 1);
      begin = i + 1;
    }
  }
  flush(s.size());
  return out;
}

}  // namespace

void check(const FilterConfig& cfg) {
  auto unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  if (!std::isfinite(cfg.cosine_threshold) || cfg.cosine_threshold < -1.0 || cfg.cosine_threshold > 1.0) {
    throw std::invalid_argument("cosine_threshold must lie in [-1, 1]");
  }
  if (!unit(cfg.levenshtein_max_norm)) throw std::invalid_argument("levenshtein_max_norm must lie in [0, 1]");
  if (!unit(cfg.hamming_max_norm)) throw std::invalid_argument("hamming_max_norm must lie in [0, 1]");
}

std::string config_hash(const FilterConfig& cfg) {
  // kernel choice is excluded: both produce identical verdicts
  nlohmann::json j{{"cosine_threshold", cfg.cosine_threshold},
                   {"levenshtein_max_norm", cfg.levenshtein_max_norm},
                   {"hamming_max_norm", cfg.hamming_max_norm},
                   {"window_slack", cfg.window_slack}};
  return sha256_hex(j.dump());
}

MentionDetector::MentionDetector(FilterConfig cfg, const llmio::Client* embedder)
    : cfg_(cfg), embedder_(embedder) {
  check(cfg_);
}

std::vector<std::vector<double>> MentionDetector::embeddings(const std::vector<std::string>& texts) const {
  std::vector<std::vector<double>> out(texts.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> slots;
  {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto it = vectors_.find(texts[i]);
      if (it != vectors_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(texts[i]);
        slots.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  std::vector<std::vector<double>> fresh;
  try {
    fresh = embedder_->embed(missing);
  } catch (const std::exception& e) {
    throw DetectionUnavailable(std::string("embedding failed: ") + e.what());
  }
  if (fresh.size() != missing.size()) throw DetectionUnavailable("embedding count does not match input count");
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < missing.size(); ++i) {
    vectors_[missing[i]] = fresh[i];
    out[slots[i]] = std::move(fresh[i]);
  }
  return out;
}

core::MentionVerdict MentionDetector::detect(std::string_view text, std::string_view entity, Scope scope) const {
  const auto ntext = text::normalize(text);
  const auto nentity = text::normalize(entity);
  if (nentity.empty()) throw std::invalid_argument("detect_mention: entity is empty");

  const auto key = sha256_hex(ntext) + '\x1f' + nentity + '\x1f' + (scope == Scope::utterance ? "u" : "s");
  {
    std::lock_guard lock(mu_);
    if (auto it = verdicts_.find(key); it != verdicts_.end()) return it->second;
  }

  const auto t = text::to_code_points(ntext);
  const auto e = text::to_code_points(nentity);
  const double len = static_cast<double>(e.size());
  core::MentionVerdict v;

  auto found = [&](core::MentionMethod m, double score, core::Span span) {
    v.matched = true;
    v.method = m;
    v.score = score;
    v.span = span;
  };

  if (auto pos = t.find(e); pos != std::u32string::npos) {
    found(core::MentionMethod::exact_substring, 0.0, {pos, pos + e.size()});
  }
  if (!v.matched) {
    auto m = cfg_.parallel_kernels ? k::omp::levenshtein_window(t, e, cfg_.window_slack)
                                   : k::serial::levenshtein_window(t, e, cfg_.window_slack);
    if (m && m->distance / len <= cfg_.levenshtein_max_norm + 1e-12) {
      found(core::MentionMethod::levenshtein_window, m->distance / len, {m->start, m->start + m->length});
    }
  }
  if (!v.matched) {
    auto m = cfg_.parallel_kernels ? k::omp::hamming_window(t, e) : k::serial::hamming_window(t, e);
    if (m && m->distance / len <= cfg_.hamming_max_norm + 1e-12) {
      found(core::MentionMethod::hamming_window, m->distance / len, {m->start, m->start + m->length});
    }
  }
  if (!v.matched && embedder_ != nullptr && !t.empty()) {
    std::vector<core::Span> spans;
    if (scope == Scope::sentences) spans = sentence_spans(t);
    if (spans.empty()) spans.push_back({0, t.size()});
    std::vector<std::string> inputs{nentity};
    for (const auto& s : spans) inputs.push_back(text::to_utf8(std::u32string_view(t).substr(s.start, s.end - s.start)));
    auto vecs = embeddings(inputs);

    const std::size_t dim = vecs[0].size();
    std::vector<double> rows;
    rows.reserve(dim * spans.size());
    for (std::size_t i = 1; i < vecs.size(); ++i) {
      if (vecs[i].size() != dim) throw DetectionUnavailable("embedding dimensions differ");
      rows.insert(rows.end(), vecs[i].begin(), vecs[i].end());
    }
    std::vector<double> sims(spans.size());
    try {
      if (cfg_.parallel_kernels) {
        k::omp::cosine_rows(vecs[0], rows, sims);
      } else {
        k::serial::cosine_rows(vecs[0], rows, sims);
      }
    } catch (const math::ZeroVector&) {
      throw DetectionUnavailable("entity embedding is the zero vector");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < sims.size(); ++i) {
      if (sims[i] > sims[best]) best = i;
    }
    if (sims[best] >= cfg_.cosine_threshold) {
      found(core::MentionMethod::embedding_cosine, sims[best], spans[best]);
    } else {
      v.method = core::MentionMethod::embedding_cosine;
      v.score = sims[best];
    }
  }

  std::lock_guard lock(mu_);
  verdicts_.emplace(key, v);
  return v;
}

core::MentionVerdict detect_mention(std::string_view text, std::string_view entity, const FilterConfig& cfg,
                                    const llmio::Client* embedder) {
  return MentionDetector(cfg, embedder).detect(text, entity, Scope::utterance);
}

}  // namespace dpf::cleanse
