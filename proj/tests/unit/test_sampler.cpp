#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "synth.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/sampler.hpp"

using namespace tabaudit;
using sampling::AuditConfig;

namespace {

ingest::DatasetFile file_of(std::size_t n) {
  return ingest::parse_dataset_file(synth::to_text(synth::distinct_rows(n, 2, n)), {});
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no tabaudit::Error thrown";
  return ErrorCode::kIoError;
}

}  // namespace

TEST(SampleWindow, ElevenRowsHasOneWindow) {
  const auto f = file_of(11);
  SplitMix64 rng(123);
  for (int i = 0; i < 20; ++i) {
    const auto w = sampling::sample_window(f, rng, 10);
    EXPECT_EQ(w.start_index, 0u);
    EXPECT_EQ(w.target_row, f.rows[10]);
    EXPECT_EQ(w.target_index(), 10u);
  }
}

TEST(SampleWindow, SameSeedSameWindow) {
  const auto f = file_of(500);
  SplitMix64 a(9), b(9);
  EXPECT_EQ(sampling::sample_window(f, a, 10), sampling::sample_window(f, b, 10));
}

TEST(SampleWindow, TooShortFile) {
  const auto f = file_of(10);
  SplitMix64 rng(1);
  EXPECT_EQ(code_of([&] { sampling::sample_window(f, rng, 10); }), ErrorCode::kFileTooShort);
  EXPECT_EQ(code_of([&] { sampling::build_trial_plan(f, AuditConfig{}); }),
            ErrorCode::kFileTooShort);
}

TEST(SampleWindow, WindowAtIsContiguous) {
  const auto f = file_of(30);
  const auto w = sampling::window_at(f, 7, 10);
  ASSERT_EQ(w.prefix_rows.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(w.prefix_rows[k], f.rows[7 + k]);
  EXPECT_EQ(w.target_row, f.rows[17]);
  EXPECT_EQ(code_of([&] { sampling::window_at(f, 20, 10); }), ErrorCode::kFileTooShort);
}

TEST(BuildTrialPlan, DefaultsOnLargeFile) {
  const auto f = file_of(5000);
  const auto plan = sampling::build_trial_plan(f, AuditConfig{});
  ASSERT_EQ(plan.trials.size(), 25u);
  EXPECT_EQ(plan.generator_id, "splitmix64");
  EXPECT_EQ(plan.file_ref, f.source_name);
  for (std::size_t i = 0; i < plan.trials.size(); ++i) {
    const auto& t = plan.trials[i];
    EXPECT_EQ(t.trial_id, i);
    ASSERT_EQ(t.fewshot.size(), 7u);
    for (const auto& w : t.fewshot) EXPECT_FALSE(w.covers(t.test.target_index()));
  }
}

TEST(BuildTrialPlan, ZeroFewshot) {
  AuditConfig cfg;
  cfg.n_fewshot = 0;
  const auto plan = sampling::build_trial_plan(file_of(100), cfg);
  for (const auto& t : plan.trials) EXPECT_TRUE(t.fewshot.empty());
}

TEST(BuildTrialPlan, TwelveRowsWindowTenIsUnsatisfiable) {
  EXPECT_EQ(code_of([] { sampling::build_trial_plan(file_of(12), AuditConfig{}); }),
            ErrorCode::kOverlapUnsatisfiable);
}

TEST(BuildTrialPlan, AllowOverlapAcceptsTinyFiles) {
  AuditConfig cfg;
  cfg.allow_overlap = true;
  const auto plan = sampling::build_trial_plan(file_of(12), cfg);
  EXPECT_EQ(plan.trials.size(), 25u);
}

TEST(BuildTrialPlan, InvalidConfig) {
  AuditConfig cfg;
  cfg.n_trials = 0;
  EXPECT_EQ(code_of([&] { sampling::build_trial_plan(file_of(50), cfg); }),
            ErrorCode::kInvalidConfig);
  cfg = {};
  cfg.window_len = 0;
  EXPECT_EQ(code_of([&] { sampling::build_trial_plan(file_of(50), cfg); }),
            ErrorCode::kInvalidConfig);
}

// Frozen: first test windows for seed 0 over 1000 rows. Values come from the
// pinned generator and draw order; a change here breaks every stored plan.
TEST(BuildTrialPlan, GoldenStartIndices) {
  AuditConfig cfg;
  cfg.n_trials = 4;
  const auto plan = sampling::build_trial_plan(file_of(1000), cfg);
  std::vector<std::size_t> starts;
  for (const auto& t : plan.trials) starts.push_back(t.test.start_index);
  // Independent check of the first draw: below(990) of SplitMix64(0).
  const std::uint64_t first = 0xe220a8397b1dcdafULL;
  EXPECT_EQ(starts[0], first % 990);
}

// Property: determinism and the non-overlap invariant over random configs.
TEST(BuildTrialPlanProperty, DeterministicAndNonOverlapping) {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 60; ++iter) {
    AuditConfig cfg;
    cfg.window_len = 1 + rng() % 12;
    cfg.n_fewshot = rng() % 8;
    cfg.n_trials = 1 + rng() % 10;
    cfg.seed = rng();
    const auto f = file_of(cfg.window_len * 3 + 20 + rng() % 200);
    const auto plan = sampling::build_trial_plan(f, cfg);
    EXPECT_EQ(plan, sampling::build_trial_plan(f, cfg));
    EXPECT_EQ(plan.trials.size(), cfg.n_trials);
    for (const auto& t : plan.trials) {
      ASSERT_EQ(t.fewshot.size(), cfg.n_fewshot);
      EXPECT_LE(t.test.start_index + cfg.window_len, f.row_count() - 1);
      for (const auto& w : t.fewshot) {
        EXPECT_FALSE(w.covers(t.test.target_index()));
        EXPECT_EQ(w, sampling::window_at(f, w.start_index, cfg.window_len));
      }
    }
  }
}

TEST(SampleWindowProperty, UniformWithinThirtyPercent) {
  const auto f = file_of(1000);
  SplitMix64 rng(2024);
  const std::size_t feasible = 1000 - 10;
  std::vector<std::size_t> counts(feasible, 0);
  const std::size_t draws = 1000000;
  for (std::size_t i = 0; i < draws; ++i) ++counts[sampling::sample_window(f, rng, 10).start_index];
  const double expected = static_cast<double>(draws) / static_cast<double>(feasible);
  double chi2 = 0.0;
  for (auto c : counts) {
    EXPECT_GT(c, 0.7 * expected);
    EXPECT_LT(c, 1.3 * expected);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  // 989 degrees of freedom; mean 989, sd ~44.5. Five sd is a loose sanity bound.
  EXPECT_LT(chi2, 989.0 + 5 * 44.5);
}
