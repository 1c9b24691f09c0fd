#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/dataset.hpp"
#include "tabaudit/sampler.hpp"
#include "tabaudit/scoring.hpp"

namespace tabaudit::confound {

// Tool defaults; every report records the values it was produced with.
struct Thresholds {
  double margin_min = 0.10;
  double confound_dup = 0.5;
  std::size_t min_run = 20;
  std::size_t label_max_cardinality = 10;
  std::size_t label_min_run = 50;

  void validate() const;

  bool operator==(const Thresholds&) const = default;
};

struct CopyBaseline {
  // levenshtein_ratio(target, last prefix row) per trial, and its mean.
  std::vector<double> per_trial;
  double mean = 0.0;
  // Best ratio over all prefix rows of the window.
  std::vector<double> per_trial_best;
  double best_mean = 0.0;
};

CopyBaseline copy_baseline(const sampling::TrialPlan& plan, const ingest::DatasetFile& file);

struct DuplicateProfile {
  std::size_t row_count = 0;
  std::size_t duplicate_rows = 0;
  // duplicate_rows / row_count, counting rows equal to their predecessor.
  double duplicate_row_fraction = 0.0;
  // maximal identical-run length -> number of runs
  std::map<std::size_t, std::size_t> run_length_histogram;

  bool operator==(const DuplicateProfile&) const = default;
};

DuplicateProfile duplicate_profile(const ingest::DatasetFile& file);

struct StuckColumn {
  std::string file_ref;
  std::size_t index = 0;
  std::size_t max_run_length = 0;

  bool operator==(const StuckColumn&) const = default;
};

std::vector<StuckColumn> detect_stuck_columns(const ingest::DatasetFile& file,
                                              std::size_t min_run = 20);

enum class ColumnClass { kFixedIncrementTimestamp, kLowCardinalityLabel, kConstant };

std::string_view to_string(ColumnClass c) noexcept;
ColumnClass parse_column_class(std::string_view name);

struct PredictableColumn {
  std::string file_ref;
  std::size_t index = 0;
  ColumnClass column_class = ColumnClass::kConstant;

  bool operator==(const PredictableColumn&) const = default;
};

// constant: one distinct value. fixed_increment_timestamp: numeric, strictly
// monotone, at most two distinct consecutive deltas. low_cardinality_label:
// at most label_max_cardinality distinct values and a run of at least
// label_min_run. Checked in that order.
std::optional<ColumnClass> classify_column(const ingest::ColumnProfile& profile,
                                           const Thresholds& thresholds = {});

std::vector<PredictableColumn> classify_predictable_columns(const ingest::DatasetFile& file,
                                                            const Thresholds& thresholds = {});

struct FileAudit {
  const ingest::DatasetFile& file;
  const sampling::TrialPlan& plan;
};

struct ConfoundProfile {
  double copy_baseline_mean = 0.0;
  double copy_baseline_best = 0.0;
  double duplicate_row_fraction = 0.0;
  std::vector<StuckColumn> stuck_columns;
  std::vector<PredictableColumn> predictable_columns;
  // Ordered by file_ref, then trial.
  std::vector<double> per_trial_copy;
  std::map<std::string, double> per_file_copy;
  std::map<std::string, DuplicateProfile> per_file_duplicates;
  // Files whose spacing is non-canonical; column analysis was not run.
  std::vector<std::string> column_analysis_skipped;

  bool operator==(const ConfoundProfile&) const = default;
};

// Copy baselines average like aggregate_scores: per-file means, then an
// unweighted mean over files in file_ref order. Duplicate fraction is pooled
// over all rows.
ConfoundProfile profile_confounds(std::span<const FileAudit> files,
                                  const Thresholds& thresholds = {});

enum class VerdictLevel { kStrongEvidence, kWeakEvidence, kConfounded, kNoEvidence };

std::string_view to_string(VerdictLevel level) noexcept;
VerdictLevel parse_verdict_level(std::string_view name);

struct Verdict {
  VerdictLevel level = VerdictLevel::kNoEvidence;
  double llm_score = 0.0;
  double copy_baseline = 0.0;
  double margin = 0.0;
  std::vector<std::string> notes;

  bool operator==(const Verdict&) const = default;
};

inline constexpr std::string_view kAbsenceCaveat =
    "A failed completion test does not necessarily mean the dataset was absent from "
    "training; it only shows the rows could not be extracted this way.";

// confounded if duplicate_row_fraction >= confound_dup; otherwise by margin =
// dataset_mean - copy_baseline_mean: strong if margin >= margin_min, weak if
// 0 < margin < margin_min, none if margin <= 0.
Verdict memorization_verdict(const scoring::DatasetScore& score, const ConfoundProfile& profile,
                             const Thresholds& thresholds = {});

}  // namespace tabaudit::confound
