#include <benchmark/benchmark.h>

#include <string>

#include "tabaudit/prompt.hpp"
#include "tabaudit/sampler.hpp"

namespace {

tabaudit::ingest::DatasetFile make_file(std::size_t rows) {
  std::string text;
  for (std::size_t r = 0; r < rows; ++r) {
    text += std::to_string(r) + "," + std::to_string(r * 3 % 17) + "\n";
  }
  return tabaudit::ingest::parse_dataset_file(text, {});
}

void BM_BuildTrialPlan(benchmark::State& state) {
  const auto file = make_file(static_cast<std::size_t>(state.range(0)));
  tabaudit::sampling::AuditConfig cfg;
  for (auto _ : state) {
    cfg.seed++;
    benchmark::DoNotOptimize(tabaudit::sampling::build_trial_plan(file, cfg));
  }
}
// Short files force overlap redraws.
BENCHMARK(BM_BuildTrialPlan)->Arg(40)->Arg(5000);

void BM_AssembleTranscripts(benchmark::State& state) {
  const auto file = make_file(5000);
  const auto plan = tabaudit::sampling::build_trial_plan(file, {});
  for (auto _ : state) {
    for (const auto& t : plan.trials) {
      benchmark::DoNotOptimize(tabaudit::prompt::transcript_for(plan, t));
    }
  }
}
BENCHMARK(BM_AssembleTranscripts);

}  // namespace
