#include "tabaudit/scoring.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::scoring {
namespace {

// Myers/Hyyro bit-vector form of the same recurrence: one machine word holds
// the vertical deltas of a whole DP column. b is the pattern, 1..64 bytes.
std::size_t bit_parallel_distance(std::string_view a, std::string_view b) {
  std::array<std::uint64_t, 256> peq;
  auto idx = [](char c) { return static_cast<unsigned char>(c); };
  // Only entries for bytes of a and b are ever read, so only those are set.
  for (char c : a) peq[idx(c)] = 0;
  for (char c : b) peq[idx(c)] = 0;
  for (std::size_t i = 0; i < b.size(); ++i) peq[idx(b[i])] |= std::uint64_t{1} << i;

  const std::uint64_t last = std::uint64_t{1} << (b.size() - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = b.size();
  for (char c : a) {
    const std::uint64_t eq = peq[idx(c)];
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & last) ++score;
    if (mh & last) --score;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

template <typename CharT>
std::size_t edit_distance(std::basic_string_view<CharT> a, std::basic_string_view<CharT> b) {
  // Common prefix and suffix never contribute edits.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a.remove_prefix(1);
    b.remove_prefix(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a.remove_suffix(1);
    b.remove_suffix(1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  if constexpr (sizeof(CharT) == 1) {
    if (b.size() <= 64) return bit_parallel_distance(a, b);
  }

  constexpr std::size_t kInline = 128;
  std::array<std::uint32_t, kInline + 1> inline_row;
  std::vector<std::uint32_t> heap_row;
  std::uint32_t* row = inline_row.data();
  if (b.size() > kInline) {
    heap_row.resize(b.size() + 1);
    row = heap_row.data();
  }
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<std::uint32_t>(j);

  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::uint32_t diag = row[0];
    row[0] = static_cast<std::uint32_t>(i);
    const CharT ca = a[i - 1];
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::uint32_t up = row[j];
      const std::uint32_t substitute = diag + (ca == b[j - 1] ? 0u : 1u);
      row[j] = std::min({up + 1, row[j - 1] + 1, substitute});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string_view strip_trailing_fence(std::string_view line) {
  if (line.ends_with("```")) line.remove_suffix(3);
  return line;
}

}  // namespace

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  return edit_distance(a, b);
}

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
  if (text::is_ascii(a) && text::is_ascii(b)) return edit_distance(a, b);
  const auto sa = text::to_scalars(a);
  const auto sb = text::to_scalars(b);
  return edit_distance(std::u32string_view(sa), std::u32string_view(sb));
}

double levenshtein_ratio(std::string_view gt, std::string_view gen) {
  const std::size_t total = text::scalar_length(gt) + text::scalar_length(gen);
  if (total == 0) return 1.0;
  const auto dist = levenshtein_distance(gt, gen);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(total);
}

CandidateRow extract_candidate_row(std::string_view completion_text,
                                   const ExtractOptions& options) {
  CandidateRow out;
  bool have_row = false;
  for (auto line : text::split_lines(completion_text)) {
    auto candidate = options.trim_whitespace ? text::trim(line) : line;
    if (options.strip_fences) {
      if (text::trim(candidate).starts_with("```")) continue;
      candidate = strip_trailing_fence(candidate);
      if (options.trim_whitespace) candidate = text::trim(candidate);
    }
    if (text::is_blank(candidate)) continue;
    if (!have_row) {
      out.row = std::string(candidate);
      have_row = true;
    } else {
      out.extra_lines.emplace_back(candidate);
    }
  }
  if (!have_row) throw Error(ErrorCode::kEmptyCompletion, "completion has no non-empty line");
  return out;
}

TrialScore score_trial(std::size_t trial_id, std::string_view ground_truth,
                       const backend::CompletionResult& completion, std::string_view copy_source,
                       const ExtractOptions& options) {
  if (ground_truth.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "ground truth row must be non-empty");
  }
  TrialScore s;
  s.trial_id = trial_id;
  s.ground_truth = std::string(ground_truth);
  s.copy_source = std::string(copy_source);
  try {
    auto candidate = extract_candidate_row(completion.text, options);
    s.generated_row = std::move(candidate.row);
    s.extra_lines = std::move(candidate.extra_lines);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyCompletion) throw;
    s.empty_completion = true;
  }
  return rescore(s);
}

TrialScore rescore(const TrialScore& score) {
  TrialScore s = score;
  s.lev_dist = levenshtein_distance(s.ground_truth, s.generated_row);
  s.ratio = levenshtein_ratio(s.ground_truth, s.generated_row);
  s.copy_ratio = levenshtein_ratio(s.ground_truth, s.copy_source);
  return s;
}

double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kNoTrials, "mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  // Rounding can land one ulp outside the inputs' range (three 0.1s average
  // to 0.10000000000000002); the exact mean never does.
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return std::clamp(sum / static_cast<double>(values.size()), *lo, *hi);
}

DatasetScore aggregate_scores(
    const std::map<std::string, std::vector<TrialScore>>& trials_by_file) {
  if (trials_by_file.empty()) throw Error(ErrorCode::kNoTrials, "no files to aggregate");
  DatasetScore out;
  std::vector<double> file_means;
  std::vector<double> pooled;
  for (const auto& [file_ref, trials] : trials_by_file) {
    if (trials.empty()) throw Error(ErrorCode::kNoTrials, file_ref + " has no trials");
    std::vector<double> ratios;
    ratios.reserve(trials.size());
    for (const auto& t : trials) ratios.push_back(t.ratio);
    const double mean = arithmetic_mean(ratios);
    out.per_file[file_ref] = mean;
    out.per_file_trials[file_ref] = trials.size();
    file_means.push_back(mean);
    pooled.insert(pooled.end(), ratios.begin(), ratios.end());
  }
  out.dataset_mean = arithmetic_mean(file_means);
  out.trial_weighted_mean = arithmetic_mean(pooled);
  out.trial_count = pooled.size();
  return out;
}

}  // namespace tabaudit::scoring
