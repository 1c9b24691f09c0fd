#include "tabaudit/sampler.hpp"

#include "tabaudit/error.hpp"

namespace tabaudit::sampling {
namespace {

void require_rows(const ingest::DatasetFile& file, std::size_t window_len) {
  if (file.row_count() < window_len + 1) {
    throw Error(ErrorCode::kFileTooShort,
                file.source_name + " has " + std::to_string(file.row_count()) +
                    " rows; a window of " + std::to_string(window_len) + " needs at least " +
                    std::to_string(window_len + 1));
  }
}

}  // namespace

void AuditConfig::validate() const {
  if (window_len < 1) throw Error(ErrorCode::kInvalidConfig, "window_len must be >= 1");
  if (n_trials < 1) throw Error(ErrorCode::kInvalidConfig, "n_trials must be >= 1");
}

WindowSample window_at(const ingest::DatasetFile& file, std::size_t start,
                       std::size_t window_len) {
  require_rows(file, window_len);
  if (start + window_len >= file.row_count()) {
    throw Error(ErrorCode::kFileTooShort, "window start " + std::to_string(start) +
                                              " leaves no target row in " + file.source_name);
  }
  WindowSample w;
  w.start_index = start;
  w.prefix_rows.assign(file.rows.begin() + static_cast<std::ptrdiff_t>(start),
                       file.rows.begin() + static_cast<std::ptrdiff_t>(start + window_len));
  w.target_row = file.rows[start + window_len];
  return w;
}

WindowSample sample_window(const ingest::DatasetFile& file, SplitMix64& rng,
                           std::size_t window_len) {
  require_rows(file, window_len);
  const std::size_t feasible = file.row_count() - window_len;
  return window_at(file, rng.below(feasible), window_len);
}

TrialPlan build_trial_plan(const ingest::DatasetFile& file, const AuditConfig& cfg) {
  cfg.validate();
  require_rows(file, cfg.window_len);

  SplitMix64 rng(cfg.seed);
  TrialPlan plan;
  plan.file_ref = file.source_name;
  plan.generator_id = std::string(SplitMix64::kGeneratorId);
  plan.config = cfg;
  plan.trials.reserve(cfg.n_trials);

  for (std::size_t t = 0; t < cfg.n_trials; ++t) {
    Trial trial;
    trial.trial_id = t;
    trial.test = sample_window(file, rng, cfg.window_len);
    const std::size_t target = trial.test.target_index();
    trial.fewshot.reserve(cfg.n_fewshot);
    for (std::size_t k = 0; k < cfg.n_fewshot; ++k) {
      auto example = sample_window(file, rng, cfg.window_len);
      std::size_t attempts = 1;
      while (!cfg.allow_overlap && example.covers(target)) {
        if (attempts == kMaxOverlapRedraws) {
          throw Error(ErrorCode::kOverlapUnsatisfiable,
                      "no few-shot window avoiding row " + std::to_string(target) + " of " +
                          file.source_name + " after " + std::to_string(attempts) +
                          " draws");
        }
        example = sample_window(file, rng, cfg.window_len);
        ++attempts;
      }
      trial.fewshot.push_back(std::move(example));
    }
    plan.trials.push_back(std::move(trial));
  }
  return plan;
}

}  // namespace tabaudit::sampling
