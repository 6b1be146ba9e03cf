#include <cmath>
#include <deque>
#include <map>
#include <numbers>

#include <gtest/gtest.h>

#include "dpf/math/distance.hpp"
#include "dpf/math/dpo.hpp"
#include "dpf/math/kernels.hpp"
#include "dpf/math/stats.hpp"
#include "dpf/util/rng.hpp"
#include "oracles.hpp"

using namespace dpf;
using namespace dpf::math;
namespace k = dpf::math::kernels;

using testkit::random_word;

TEST(Levenshtein, MatchesBreadthFirstOracle) {
  auto nodes = testkit::all_strings(5);
  ASSERT_EQ(nodes.size(), 364u);
  auto dist = testkit::bfs_edit_distances(nodes, 5);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      ASSERT_EQ(levenshtein(nodes[i], nodes[j]), static_cast<std::size_t>(dist[i][j]));
    }
  }
}

TEST(Levenshtein, KnownValuesAndUtf8) {
  EXPECT_EQ(levenshtein(std::string_view("kitten"), std::string_view("sitting")), 3u);
  EXPECT_EQ(levenshtein(std::string_view("Ångström"), std::string_view("Angstrom")), 2u);
  EXPECT_EQ(levenshtein(std::string_view(""), std::string_view("abc")), 3u);
}

TEST(Hamming, BoundsLevenshteinFromAbove) {
  Rng rng(42);
  for (int i = 0; i < 10000; ++i) {
    auto len = rng.index(12);
    auto a = random_word(rng, len, 4), b = random_word(rng, len, 4);
    ASSERT_GE(hamming(a, b), levenshtein(a, b));
  }
  EXPECT_THROW(hamming(std::u32string_view(U"ab"), std::u32string_view(U"abc")), LengthMismatch);
}

TEST(Cosine, ValuesAndErrors) {
  std::vector<double> a{1, 0}, b{0, 2}, c{3, 0}, z{0, 0};
  EXPECT_DOUBLE_EQ(cosine(a, b), 0.0);
  EXPECT_DOUBLE_EQ(cosine(a, c), 1.0);
  EXPECT_THROW(cosine(a, z), ZeroVector);
  EXPECT_THROW(cosine(a, std::vector<double>{1, 2, 3}), DimensionMismatch);
}

TEST(Kernels, LevenshteinWindowHandExample) {
  std::u32string text = U"i love rugbby";
  auto m = k::serial::levenshtein_window(text, U"rugby", 2);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->distance, 1u);
  EXPECT_EQ(m->start, 7u);
  // "rugb", "rugbb" and "rugbby" all cost 1; the shortest wins the tie
  EXPECT_EQ(m->length, 4u);
}

TEST(Kernels, WindowEdgeCases) {
  EXPECT_FALSE(k::serial::levenshtein_window(U"abc", U"", 2));
  EXPECT_FALSE(k::omp::levenshtein_window(U"", U"abc", 0));
  EXPECT_FALSE(k::serial::hamming_window(U"ab", U"abc"));
  auto h = k::omp::hamming_window(U"xxabdxx", U"abc");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->distance, 1u);
  EXPECT_EQ(h->start, 2u);
}

TEST(Kernels, OmpMatchesSerialReference) {
  Rng rng(7);
  for (int i = 0; i < 300; ++i) {
    // long texts cross the threshold where the OpenMP path actually forks
    auto text = random_word(rng, rng.index(i % 10 == 0 ? 900 : 60), 3);
    auto pat = random_word(rng, 1 + rng.index(8), 3);
    auto slack = rng.index(4);
    ASSERT_EQ(k::serial::levenshtein_window(text, pat, slack), k::omp::levenshtein_window(text, pat, slack));
    ASSERT_EQ(k::serial::hamming_window(text, pat), k::omp::hamming_window(text, pat));
  }
}

TEST(Kernels, LevenshteinWindowAgreesWithBruteForce) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    auto text = random_word(rng, rng.index(25), 3);
    auto pat = random_word(rng, 1 + rng.index(6), 3);
    std::size_t slack = rng.index(3);
    std::optional<k::WindowMatch> best;
    std::size_t lo = pat.size() > slack ? pat.size() - slack : 1;
    for (std::size_t s = 0; s < text.size(); ++s) {
      for (std::size_t len = lo; len <= pat.size() + slack && s + len <= text.size(); ++len) {
        k::WindowMatch m{levenshtein(text.substr(s, len), pat), s, len};
        if (!best || k::better(m, *best)) best = m;
      }
    }
    ASSERT_EQ(k::omp::levenshtein_window(text, pat, slack), best);
  }
}

TEST(Kernels, CosineRowsOmpMatchesSerial) {
  Rng rng(3);
  const std::size_t dim = 17, rows = 600;
  std::vector<double> q(dim), m(dim * rows);
  for (auto& x : q) x = rng.uniform(-1, 1);
  for (auto& x : m) x = rng.uniform(-1, 1);
  std::fill(m.begin() + 5 * dim, m.begin() + 6 * dim, 0.0);
  std::vector<double> a(rows), b(rows);
  k::serial::cosine_rows(q, m, a);
  k::omp::cosine_rows(q, m, b);
  for (std::size_t r = 0; r < rows; ++r) {
    ASSERT_NEAR(a[r], b[r], 1e-12);
    ASSERT_NEAR(a[r], r == 5 ? 0.0 : cosine(q, std::span<const double>(m).subspan(r * dim, dim)), 1e-12);
  }
  std::vector<double> zero(dim, 0.0);
  EXPECT_THROW(k::serial::cosine_rows(zero, m, a), ZeroVector);
  EXPECT_THROW(k::omp::cosine_rows(zero, m, b), ZeroVector);
}

TEST(Stats, Perplexity) {
  std::vector<double> lp{-1.0, -1.0, -1.0};
  EXPECT_NEAR(perplexity(lp), std::numbers::e, 1e-12);
  EXPECT_THROW(perplexity(std::vector<double>{}), EmptySequence);
  EXPECT_THROW(perplexity(std::vector<double>{-1.0, NAN}), NonFiniteInput);
}

TEST(Stats, ProportionSe) {
  EXPECT_NEAR(proportion_se(0.33, 2211), 0.010, 0.0005);
  EXPECT_DOUBLE_EQ(proportion_se(0.0, 10), 0.0);
  EXPECT_THROW(proportion_se(1.5, 10), std::invalid_argument);
}

TEST(Stats, DeltaSeMatchesDirectFormula) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng.index(300);
    std::vector<bool> a(n), b(n);
    long double sum = 0;
    std::vector<long double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.bernoulli(0.4);
      b[i] = rng.bernoulli(0.2);
      d[i] = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
      sum += d[i];
    }
    long double mean = sum / n, ss = 0;
    for (auto x : d) ss += (x - mean) * (x - mean);
    double expect = static_cast<double>(std::sqrt(ss / (n - 1) / n));
    ASSERT_NEAR(delta_se(a, b), expect, 1e-12);
  }
  EXPECT_DOUBLE_EQ(delta_se({true}, {false}), 0.0);
  EXPECT_THROW(delta_se({true}, {true, false}), LengthMismatch);
  EXPECT_NEAR(delta_se_quadrature(0.03, 0.04), 0.05, 1e-15);
}

TEST(Dpo, EqualPolicyAndReferenceGivesLn2) {
  DpoInputs in{0.5, -12.0, -15.0, -12.0, -15.0};
  auto r = dpo_loss(in);
  EXPECT_NEAR(r.loss, std::numbers::ln2, 1e-12);
  EXPECT_NEAR(r.grad.chosen_policy, -0.25, 1e-15);  // -beta * sigmoid(0)
}

TEST(Dpo, GradientMatchesCentralDifferences) {
  Rng rng(99);
  const double h = 1e-5;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    DpoInputs in;
    in.beta = rng.uniform(0.05, 2.0);
    double* xs[] = {&in.logp_chosen_policy, &in.logp_rejected_policy, &in.logp_chosen_ref, &in.logp_rejected_ref};
    for (auto* x : xs) *x = rng.uniform(-30.0, -0.1);
    auto r = dpo_loss(in);
    const double g[] = {r.grad.chosen_policy, r.grad.rejected_policy, r.grad.chosen_ref, r.grad.rejected_ref};
    for (int i = 0; i < 4; ++i) {
      auto up = in, dn = in;
      double* u[] = {&up.logp_chosen_policy, &up.logp_rejected_policy, &up.logp_chosen_ref, &up.logp_rejected_ref};
      double* d[] = {&dn.logp_chosen_policy, &dn.logp_rejected_policy, &dn.logp_chosen_ref, &dn.logp_rejected_ref};
      *u[i] += h;
      *d[i] -= h;
      double fd = (dpo_loss(up).loss - dpo_loss(dn).loss) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[i]) / std::max(std::abs(g[i]), 1e-300));
    }
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Dpo, StableForLargeMargins) {
  auto far = dpo_loss({1.0, 0.0, -2000.0, 0.0, 0.0});
  EXPECT_TRUE(std::isfinite(far.loss));
  EXPECT_NEAR(far.loss, 0.0, 1e-300);
  auto wrong = dpo_loss({1.0, -2000.0, 0.0, 0.0, 0.0});
  EXPECT_NEAR(wrong.loss, 2000.0, 1e-9);
  EXPECT_THROW(dpo_loss({0.0, 0, 0, 0, 0}), std::invalid_argument);
}
