#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tabaudit/dataset.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit::sampling {

struct AuditConfig {
  std::size_t window_len = 10;
  std::size_t n_fewshot = 7;
  std::size_t n_trials = 25;
  std::uint64_t seed = 0;
  // When false, a few-shot window (prefix rows plus its own target) may not
  // cover the test target row.
  bool allow_overlap = false;

  void validate() const;

  bool operator==(const AuditConfig&) const = default;
};

struct WindowSample {
  std::size_t start_index = 0;
  std::vector<std::string> prefix_rows;
  std::string target_row;

  std::size_t target_index() const noexcept { return start_index + prefix_rows.size(); }
  // Inclusive row range [start_index, target_index()].
  bool covers(std::size_t row) const noexcept {
    return row >= start_index && row <= target_index();
  }

  bool operator==(const WindowSample&) const = default;
};

struct Trial {
  std::size_t trial_id = 0;
  WindowSample test;
  std::vector<WindowSample> fewshot;

  bool operator==(const Trial&) const = default;
};

struct TrialPlan {
  std::string file_ref;
  std::string generator_id;
  AuditConfig config;
  std::vector<Trial> trials;

  bool operator==(const TrialPlan&) const = default;
};

inline constexpr std::size_t kMaxOverlapRedraws = 1000;

// The window starting at `start`; throws FileTooShort if it does not fit.
WindowSample window_at(const ingest::DatasetFile& file, std::size_t start,
                       std::size_t window_len);

// Start index uniform over [0, row_count - window_len - 1].
WindowSample sample_window(const ingest::DatasetFile& file, SplitMix64& rng,
                           std::size_t window_len);

// Draw order is fixed: per trial, the test window first, then each few-shot
// window (with its redraws) in order. One SplitMix64 stream seeded by cfg.seed.
TrialPlan build_trial_plan(const ingest::DatasetFile& file, const AuditConfig& cfg);

}  // namespace tabaudit::sampling
