// Serial reference vs OpenMP kernels on mention-detection shaped inputs.
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "dpf/math/kernels.hpp"
#include "dpf/util/rng.hpp"

namespace k = dpf::math::kernels;

namespace {

std::u32string random_text(std::size_t n, std::uint64_t seed) {
  dpf::Rng rng(seed);
  std::u32string s(n, U' ');
  for (auto& c : s) c = rng.bernoulli(0.15) ? U' ' : static_cast<char32_t>(U'a' + rng.index(26));
  return s;
}

std::vector<double> random_rows(std::size_t rows, std::size_t dim, std::uint64_t seed) {
  dpf::Rng rng(seed);
  std::vector<double> v(rows * dim);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <bool Omp>
void BM_LevenshteinWindow(benchmark::State& state) {
  auto text = random_text(static_cast<std::size_t>(state.range(0)), 1);
  std::u32string pattern = U"adidasx";
  for (auto _ : state) {
    auto m = Omp ? k::omp::levenshtein_window(text, pattern, 2) : k::serial::levenshtein_window(text, pattern, 2);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_HammingWindow(benchmark::State& state) {
  auto text = random_text(static_cast<std::size_t>(state.range(0)), 2);
  std::u32string pattern = U"adidasx";
  for (auto _ : state) {
    auto m = Omp ? k::omp::hamming_window(text, pattern) : k::serial::hamming_window(text, pattern);
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Omp>
void BM_CosineRows(benchmark::State& state) {
  const std::size_t rows = static_cast<std::size_t>(state.range(0)), dim = 384;
  auto query = random_rows(1, dim, 3);
  auto mat = random_rows(rows, dim, 4);
  std::vector<double> out(rows);
  for (auto _ : state) {
    if (Omp) {
      k::omp::cosine_rows(query, mat, out);
    } else {
      k::serial::cosine_rows(query, mat, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LevenshteinWindow<false>)->Name("levenshtein_window/serial")->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK(BM_LevenshteinWindow<true>)->Name("levenshtein_window/omp")->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK(BM_HammingWindow<false>)->Name("hamming_window/serial")->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK(BM_HammingWindow<true>)->Name("hamming_window/omp")->Arg(256)->Arg(4096)->Arg(65536);
BENCHMARK(BM_CosineRows<false>)->Name("cosine_rows/serial")->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK(BM_CosineRows<true>)->Name("cosine_rows/omp")->Arg(64)->Arg(1024)->Arg(16384);

BENCHMARK_MAIN();
