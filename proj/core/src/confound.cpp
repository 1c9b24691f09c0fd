#include "tabaudit/confound.hpp"

#include <algorithm>
#include <sstream>

#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::confound {

void Thresholds::validate() const {
  if (!(margin_min >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "margin_min must be >= 0");
  if (!(confound_dup >= 0.0 && confound_dup <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "confound_dup must lie in [0, 1]");
  }
  if (min_run < 1) throw Error(ErrorCode::kInvalidConfig, "min_run must be >= 1");
  if (label_min_run < 1) throw Error(ErrorCode::kInvalidConfig, "label_min_run must be >= 1");
}

CopyBaseline copy_baseline(const sampling::TrialPlan& plan, const ingest::DatasetFile& file) {
  if (plan.file_ref != file.source_name) {
    throw Error(ErrorCode::kInvalidConfig,
                "plan for " + plan.file_ref + " used with " + file.source_name);
  }
  if (plan.trials.empty()) throw Error(ErrorCode::kNoTrials, plan.file_ref + " has no trials");
  CopyBaseline out;
  out.per_trial.reserve(plan.trials.size());
  out.per_trial_best.reserve(plan.trials.size());
  for (const auto& trial : plan.trials) {
    const auto& target = trial.test.target_row;
    out.per_trial.push_back(scoring::levenshtein_ratio(target, trial.test.prefix_rows.back()));
    double best = 0.0;
    for (const auto& row : trial.test.prefix_rows) {
      best = std::max(best, scoring::levenshtein_ratio(target, row));
    }
    out.per_trial_best.push_back(best);
  }
  out.mean = scoring::arithmetic_mean(out.per_trial);
  out.best_mean = scoring::arithmetic_mean(out.per_trial_best);
  return out;
}

DuplicateProfile duplicate_profile(const ingest::DatasetFile& file) {
  DuplicateProfile out;
  out.row_count = file.rows.size();
  std::size_t run = 0;
  for (std::size_t i = 0; i < file.rows.size(); ++i) {
    if (i > 0 && file.rows[i] == file.rows[i - 1]) {
      ++out.duplicate_rows;
      ++run;
    } else {
      if (run > 0) ++out.run_length_histogram[run];
      run = 1;
    }
  }
  if (run > 0) ++out.run_length_histogram[run];
  out.duplicate_row_fraction =
      out.row_count == 0 ? 0.0
                         : static_cast<double>(out.duplicate_rows) /
                               static_cast<double>(out.row_count);
  return out;
}

std::vector<StuckColumn> detect_stuck_columns(const ingest::DatasetFile& file,
                                              std::size_t min_run) {
  std::vector<StuckColumn> out;
  for (const auto& p : ingest::profile_columns(file)) {
    if (p.max_run_length >= min_run) out.push_back({file.source_name, p.index, p.max_run_length});
  }
  return out;
}

std::string_view to_string(ColumnClass c) noexcept {
  switch (c) {
    case ColumnClass::kFixedIncrementTimestamp: return "fixed_increment_timestamp";
    case ColumnClass::kLowCardinalityLabel: return "low_cardinality_label";
    case ColumnClass::kConstant: return "constant";
  }
  return "constant";
}

ColumnClass parse_column_class(std::string_view name) {
  if (name == "fixed_increment_timestamp") return ColumnClass::kFixedIncrementTimestamp;
  if (name == "low_cardinality_label") return ColumnClass::kLowCardinalityLabel;
  if (name == "constant") return ColumnClass::kConstant;
  throw Error(ErrorCode::kParseError, "unknown column class '" + std::string(name) + "'");
}

std::optional<ColumnClass> classify_column(const ingest::ColumnProfile& p,
                                           const Thresholds& thresholds) {
  if (p.value_count == 0) return std::nullopt;
  if (p.distinct_count == 1) return ColumnClass::kConstant;
  if (p.is_numeric && p.increment_stats) {
    const auto& inc = *p.increment_stats;
    if (!inc.truncated && inc.deltas.size() <= 2 && inc.strictly_monotone()) {
      return ColumnClass::kFixedIncrementTimestamp;
    }
  }
  if (p.distinct_count <= thresholds.label_max_cardinality &&
      p.max_run_length >= thresholds.label_min_run) {
    return ColumnClass::kLowCardinalityLabel;
  }
  return std::nullopt;
}

std::vector<PredictableColumn> classify_predictable_columns(const ingest::DatasetFile& file,
                                                            const Thresholds& thresholds) {
  std::vector<PredictableColumn> out;
  for (const auto& p : ingest::profile_columns(file)) {
    if (const auto c = classify_column(p, thresholds)) {
      out.push_back({file.source_name, p.index, *c});
    }
  }
  return out;
}

ConfoundProfile profile_confounds(std::span<const FileAudit> files,
                                  const Thresholds& thresholds) {
  if (files.empty()) throw Error(ErrorCode::kNoTrials, "no files to profile");
  thresholds.validate();

  std::vector<const FileAudit*> ordered;
  for (const auto& f : files) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(), [](const FileAudit* a, const FileAudit* b) {
    return a->file.source_name < b->file.source_name;
  });

  ConfoundProfile out;
  std::vector<double> file_means;
  std::vector<double> file_best;
  std::size_t rows = 0;
  std::size_t duplicates = 0;
  for (const auto* f : ordered) {
    const auto& file = f->file;
    const auto copy = copy_baseline(f->plan, file);
    out.per_file_copy[file.source_name] = copy.mean;
    file_means.push_back(copy.mean);
    file_best.push_back(copy.best_mean);
    out.per_trial_copy.insert(out.per_trial_copy.end(), copy.per_trial.begin(),
                              copy.per_trial.end());

    auto dup = duplicate_profile(file);
    rows += dup.row_count;
    duplicates += dup.duplicate_rows;
    out.per_file_duplicates[file.source_name] = std::move(dup);

    if (file.non_canonical_spacing) {
      out.column_analysis_skipped.push_back(file.source_name);
      continue;
    }
    for (const auto& p : ingest::profile_columns(file)) {
      if (p.max_run_length >= thresholds.min_run) {
        out.stuck_columns.push_back({file.source_name, p.index, p.max_run_length});
      }
      if (const auto c = classify_column(p, thresholds)) {
        out.predictable_columns.push_back({file.source_name, p.index, *c});
      }
    }
  }
  out.copy_baseline_mean = scoring::arithmetic_mean(file_means);
  out.copy_baseline_best = scoring::arithmetic_mean(file_best);
  out.duplicate_row_fraction =
      rows == 0 ? 0.0 : static_cast<double>(duplicates) / static_cast<double>(rows);
  return out;
}

std::string_view to_string(VerdictLevel level) noexcept {
  switch (level) {
    case VerdictLevel::kStrongEvidence: return "strong_evidence";
    case VerdictLevel::kWeakEvidence: return "weak_evidence";
    case VerdictLevel::kConfounded: return "confounded";
    case VerdictLevel::kNoEvidence: return "no_evidence";
  }
  return "no_evidence";
}

VerdictLevel parse_verdict_level(std::string_view name) {
  if (name == "strong_evidence") return VerdictLevel::kStrongEvidence;
  if (name == "weak_evidence") return VerdictLevel::kWeakEvidence;
  if (name == "confounded") return VerdictLevel::kConfounded;
  if (name == "no_evidence") return VerdictLevel::kNoEvidence;
  throw Error(ErrorCode::kParseError, "unknown verdict level '" + std::string(name) + "'");
}

Verdict memorization_verdict(const scoring::DatasetScore& score, const ConfoundProfile& profile,
                             const Thresholds& thresholds) {
  Verdict v;
  v.llm_score = score.dataset_mean;
  v.copy_baseline = profile.copy_baseline_mean;
  v.margin = v.llm_score - v.copy_baseline;

  const bool confounded = profile.duplicate_row_fraction >= thresholds.confound_dup;
  if (confounded) {
    v.level = VerdictLevel::kConfounded;
  } else if (v.margin >= thresholds.margin_min) {
    v.level = VerdictLevel::kStrongEvidence;
  } else if (v.margin > 0.0) {
    v.level = VerdictLevel::kWeakEvidence;
  } else {
    v.level = VerdictLevel::kNoEvidence;
  }

  using text::format_double;
  if (confounded) {
    v.notes.push_back("duplicate_row_fraction " + format_double(profile.duplicate_row_fraction) +
                      " >= " + format_double(thresholds.confound_dup) +
                      ": repeated rows let a model score well by copying its context");
  }
  for (const auto& s : profile.stuck_columns) {
    v.notes.push_back("stuck column " + std::to_string(s.index) + " in " + s.file_ref +
                      " (identical run of " + std::to_string(s.max_run_length) + " rows)");
  }
  for (const auto& p : profile.predictable_columns) {
    v.notes.push_back("predictable column " + std::to_string(p.index) + " in " + p.file_ref +
                      ": " + std::string(to_string(p.column_class)));
  }
  for (const auto& f : profile.column_analysis_skipped) {
    v.notes.push_back("column analysis skipped for " + f + " (non-canonical spacing)");
  }
  if (profile.stuck_columns.empty() && profile.predictable_columns.empty()) {
    v.notes.push_back("no stuck or predictable columns detected");
  }
  if (v.level == VerdictLevel::kNoEvidence) v.notes.emplace_back(kAbsenceCaveat);
  return v;
}

}  // namespace tabaudit::confound
