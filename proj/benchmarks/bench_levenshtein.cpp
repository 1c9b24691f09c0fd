#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tabaudit/scoring.hpp"

namespace {

std::string random_row(std::mt19937_64& rng, std::size_t len) {
  static constexpr char kAlphabet[] = "0123456789.,-";
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
  std::string s(len, ' ');
  for (auto& c : s) c = kAlphabet[pick(rng)];
  return s;
}

void BM_LevenshteinRandom(benchmark::State& state) {
  std::mt19937_64 rng(42);
  const auto len = static_cast<std::size_t>(state.range(0));
  const auto a = random_row(rng, len);
  const auto b = random_row(rng, len);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tabaudit::scoring::levenshtein_distance(a, b));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LevenshteinRandom)->RangeMultiplier(2)->Range(16, 1024)->Complexity();

// Sensor rows usually share most of their characters with the truth.
void BM_LevenshteinNearMatch(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto a = random_row(rng, static_cast<std::size_t>(state.range(0)));
  auto b = a;
  b[b.size() / 2] = b[b.size() / 2] == '1' ? '2' : '1';
  for (auto _ : state) {
    benchmark::DoNotOptimize(tabaudit::scoring::levenshtein_ratio(a, b));
  }
}
BENCHMARK(BM_LevenshteinNearMatch)->Arg(64)->Arg(256);

void BM_LevenshteinUnicode(benchmark::State& state) {
  const std::string a = "temp 21.5°C, ümlaut, 温度 22.0";
  const std::string b = "temp 21.7°C, umlaut, 温度 22.0";
  for (auto _ : state) {
    benchmark::DoNotOptimize(tabaudit::scoring::levenshtein_distance(a, b));
  }
}
BENCHMARK(BM_LevenshteinUnicode);

}  // namespace
