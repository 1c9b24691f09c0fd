#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/backend.hpp"

namespace tabaudit::scoring {

// Unit-cost edit distance over Unicode scalar values. Two-row dynamic
// program: O(|a|*|b|) time, O(min(|a|,|b|)) space.
std::size_t levenshtein_distance(std::string_view a, std::string_view b);
std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);

// 1 - lev_dist / (len_gt + len_gen), lengths in scalar values; 1.0 when both
// strings are empty.
double levenshtein_ratio(std::string_view gt, std::string_view gen);

struct ExtractOptions {
  bool strip_fences = true;
  bool trim_whitespace = true;

  bool operator==(const ExtractOptions&) const = default;
};

struct CandidateRow {
  std::string row;
  std::vector<std::string> extra_lines;

  bool operator==(const CandidateRow&) const = default;
};

// First non-empty line is the scored row; the remaining non-empty lines are
// kept as extra predictions. Lines opening a markdown fence are dropped and a
// trailing ``` is cut. Throws EmptyCompletion.
CandidateRow extract_candidate_row(std::string_view completion_text,
                                   const ExtractOptions& options = {});

struct TrialScore {
  std::size_t trial_id = 0;
  std::string ground_truth;
  std::string generated_row;
  std::vector<std::string> extra_lines;
  std::size_t lev_dist = 0;
  double ratio = 0.0;
  // Ratio a copy of the last prefix row achieves against the ground truth.
  std::string copy_source;
  double copy_ratio = 0.0;
  // Completion had no non-empty line; scored as an empty generated row.
  bool empty_completion = false;

  bool operator==(const TrialScore&) const = default;
};

TrialScore score_trial(std::size_t trial_id, std::string_view ground_truth,
                       const backend::CompletionResult& completion, std::string_view copy_source,
                       const ExtractOptions& options = {});

// Recomputes lev_dist, ratio and copy_ratio from the strings of `score`.
TrialScore rescore(const TrialScore& score);

struct DatasetScore {
  // file_ref -> arithmetic mean ratio over that file's trials.
  std::map<std::string, double> per_file;
  std::map<std::string, std::size_t> per_file_trials;
  // Unweighted mean of the per-file means.
  double dataset_mean = 0.0;
  // Mean over all trials pooled (files weighted by trial count).
  double trial_weighted_mean = 0.0;
  std::size_t trial_count = 0;

  bool operator==(const DatasetScore&) const = default;
};

// Left-to-right sum divided by the count, clamped to [min, max] of the
// inputs. Every mean in the tool goes through here so equal inputs give
// bit-identical results.
double arithmetic_mean(std::span<const double> values);

DatasetScore aggregate_scores(const std::map<std::string, std::vector<TrialScore>>& trials_by_file);

}  // namespace tabaudit::scoring
