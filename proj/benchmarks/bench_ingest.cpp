#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "tabaudit/dataset.hpp"

namespace {

std::string make_text(std::size_t rows, char delim) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> v(0, 9999);
  std::string out;
  for (std::size_t r = 0; r < rows; ++r) {
    out += std::to_string(r * 15);
    for (int c = 0; c < 9; ++c) {
      out += delim;
      out += std::to_string(v(rng));
    }
    out += '\n';
  }
  return out;
}

void BM_ParseCsv(benchmark::State& state) {
  const auto text = make_text(static_cast<std::size_t>(state.range(0)), ',');
  tabaudit::ingest::ParseConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tabaudit::ingest::parse_dataset_file(text, cfg));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseCsv)->Arg(1000)->Arg(10000);

void BM_InferFormat(benchmark::State& state) {
  const auto text = make_text(1000, ' ');
  for (auto _ : state) benchmark::DoNotOptimize(tabaudit::ingest::infer_format(text));
}
BENCHMARK(BM_InferFormat);

void BM_ProfileColumns(benchmark::State& state) {
  const auto file =
      tabaudit::ingest::parse_dataset_file(make_text(10000, ','), tabaudit::ingest::ParseConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(tabaudit::ingest::profile_columns(file));
}
BENCHMARK(BM_ProfileColumns);

}  // namespace
