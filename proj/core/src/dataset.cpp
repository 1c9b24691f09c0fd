#include "tabaudit/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::ingest {
namespace {

constexpr std::array<char, 4> kCandidates = {',', '\t', ';', ' '};
constexpr std::size_t kSampleLines = 50;
constexpr double kConsistencyRequired = 0.9;

bool is_comment(std::string_view line, const std::optional<std::string>& prefix) {
  return prefix && !prefix->empty() && line.starts_with(*prefix);
}

bool has_noncanonical_spacing(std::string_view row) {
  if (row.empty()) return false;
  return row.front() == ' ' || row.back() == ' ' || row.find("  ") != std::string_view::npos;
}

struct Consistency {
  double fraction = 0.0;
  std::size_t modal_count = 0;
};

Consistency measure(const std::vector<std::string_view>& lines, char delimiter) {
  std::map<std::size_t, std::size_t> histogram;
  for (auto line : lines) ++histogram[split_row(line, delimiter).size()];
  Consistency best;
  for (const auto& [count, freq] : histogram) {
    const double fraction = static_cast<double>(freq) / static_cast<double>(lines.size());
    if (fraction > best.fraction || (fraction == best.fraction && count > best.modal_count)) {
      best = {fraction, count};
    }
  }
  return best;
}

bool all_numeric(const std::vector<std::string>& tokens) {
  return std::all_of(tokens.begin(), tokens.end(),
                     [](const std::string& t) { return text::parse_number(t).has_value(); });
}

double round_delta(double d) { return std::round(d * 1e9) / 1e9; }

}  // namespace

bool is_supported_delimiter(char c) noexcept {
  return std::find(kCandidates.begin(), kCandidates.end(), c) != kCandidates.end();
}

void ParseConfig::validate() const {
  if (!is_supported_delimiter(delimiter)) {
    throw Error(ErrorCode::kInvalidConfig,
                "unsupported delimiter '" + std::string(1, delimiter) + "'");
  }
  if (expected_column_count && *expected_column_count < 1) {
    throw Error(ErrorCode::kInvalidConfig, "expected_column_count must be >= 1");
  }
}

std::vector<std::string> split_row(std::string_view row, char delimiter) {
  if (delimiter != ' ') return text::split(row, delimiter);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < row.size()) {
    while (i < row.size() && row[i] == ' ') ++i;
    if (i >= row.size()) break;
    const auto end = std::min(row.find(' ', i), row.size());
    out.emplace_back(row.substr(i, end - i));
    i = end;
  }
  if (out.empty()) out.emplace_back();
  return out;
}

ParseConfig infer_format(std::string_view raw_text) {
  if (raw_text.empty()) throw Error(ErrorCode::kInvalidConfig, "empty input");

  ParseConfig cfg;
  std::vector<std::string_view> sample;
  for (auto line : text::split_lines(raw_text)) {
    if (text::is_blank(line)) continue;
    if (line.starts_with("#")) {
      cfg.comment_prefix = "#";
      continue;
    }
    sample.push_back(line);
    if (sample.size() == kSampleLines) break;
  }
  if (sample.empty()) {
    throw Error(ErrorCode::kNoConsistentDelimiter, "no data lines to sample");
  }

  std::optional<char> chosen;
  Consistency chosen_score;
  for (char c : kCandidates) {
    const auto score = measure(sample, c);
    // A delimiter must actually split the line into at least two fields.
    if (score.modal_count < 2 || score.fraction < kConsistencyRequired) continue;
    if (!chosen || score.fraction > chosen_score.fraction) {
      chosen = c;
      chosen_score = score;
    }
  }
  if (!chosen) {
    throw Error(ErrorCode::kNoConsistentDelimiter,
                "no delimiter yields equal token counts on >= 90% of sampled lines");
  }
  cfg.delimiter = *chosen;

  if (sample.size() >= 2) {
    const auto first = split_row(sample[0], cfg.delimiter);
    const auto second = split_row(sample[1], cfg.delimiter);
    cfg.has_header = !all_numeric(first) && all_numeric(second);
  }
  return cfg;
}

DatasetFile parse_dataset_file(std::string_view raw_text, const ParseConfig& cfg,
                               std::string source_name) {
  cfg.validate();
  if (raw_text.empty()) throw Error(ErrorCode::kEmptyAfterFiltering, "empty input");

  std::string sanitized;
  if (!text::is_ascii(raw_text)) {
    sanitized = text::sanitize_utf8(raw_text);
    raw_text = sanitized;
  }

  DatasetFile file;
  file.source_name = std::move(source_name);
  file.delimiter = cfg.delimiter;

  bool header_pending = cfg.has_header;
  std::size_t line_no = 0;
  std::map<std::size_t, std::size_t> width_histogram;
  for (auto line : text::split_lines(raw_text)) {
    ++line_no;
    if (text::is_blank(line) || is_comment(line, cfg.comment_prefix)) continue;
    auto tokens = split_row(line, cfg.delimiter);
    if (header_pending) {
      header_pending = false;
      file.header_line = std::string(line);
      file.header = std::move(tokens);
      continue;
    }
    if (cfg.expected_column_count && tokens.size() != *cfg.expected_column_count) {
      throw ColumnCountMismatch(line_no, *cfg.expected_column_count, tokens.size());
    }
    if (cfg.delimiter == ' ' && has_noncanonical_spacing(line)) {
      file.non_canonical_spacing = true;
    }
    ++width_histogram[tokens.size()];
    file.rows.emplace_back(line);
    file.cells.push_back(std::move(tokens));
    file.line_numbers.push_back(line_no);
  }
  if (file.rows.empty()) {
    throw Error(ErrorCode::kEmptyAfterFiltering, "no data rows in " + file.source_name);
  }
  if (cfg.expected_column_count) {
    file.column_count = *cfg.expected_column_count;
  } else {
    // Modal width; ties resolve to the wider layout.
    std::size_t best_freq = 0;
    for (const auto& [width, freq] : width_histogram) {
      if (freq >= best_freq) {
        best_freq = freq;
        file.column_count = width;
      }
    }
  }
  return file;
}

DatasetFile load_dataset_file(const std::filesystem::path& path,
                              const std::optional<ParseConfig>& cfg) {
  const auto raw = text::read_file_lossy(path);
  const auto effective = cfg ? *cfg : infer_format(raw);
  return parse_dataset_file(raw, effective, path.string());
}

std::vector<ColumnProfile> profile_columns(const DatasetFile& file) {
  std::size_t width = 0;
  for (const auto& row : file.cells) width = std::max(width, row.size());

  std::vector<ColumnProfile> profiles;
  profiles.reserve(width);
  for (std::size_t col = 0; col < width; ++col) {
    ColumnProfile p;
    p.index = col;
    p.is_numeric = true;

    std::unordered_set<std::string_view> distinct;
    const std::string* prev = nullptr;
    std::size_t run = 0;
    std::optional<double> prev_value;
    std::set<double> deltas;
    bool truncated = false;
    double min_delta = 0.0;
    double max_delta = 0.0;
    bool have_delta = false;

    for (const auto& row : file.cells) {
      if (col >= row.size()) continue;  // ragged row
      const auto& value = row[col];
      ++p.value_count;
      distinct.insert(value);
      run = (prev && *prev == value) ? run + 1 : 1;
      p.max_run_length = std::max(p.max_run_length, run);
      prev = &value;

      if (!p.is_numeric) continue;
      const auto number = text::parse_number(value);
      if (!number) {
        p.is_numeric = false;
        continue;
      }
      if (prev_value) {
        const double d = round_delta(*number - *prev_value);
        if (!have_delta) {
          min_delta = max_delta = d;
          have_delta = true;
        } else {
          min_delta = std::min(min_delta, d);
          max_delta = std::max(max_delta, d);
        }
        if (deltas.size() < IncrementStats::kMaxDistinct) {
          deltas.insert(d);
        } else if (!deltas.contains(d)) {
          truncated = true;
        }
      }
      prev_value = number;
    }

    p.distinct_count = distinct.size();
    p.distinct_fraction = p.value_count == 0 ? 0.0
                                             : static_cast<double>(p.distinct_count) /
                                                   static_cast<double>(p.value_count);
    if (p.value_count == 0) p.is_numeric = false;
    if (p.is_numeric) {
      IncrementStats stats;
      stats.deltas.assign(deltas.begin(), deltas.end());
      stats.truncated = truncated;
      stats.min_delta = min_delta;
      stats.max_delta = max_delta;
      p.increment_stats = std::move(stats);
    }
    profiles.push_back(std::move(p));
  }
  return profiles;
}

}  // namespace tabaudit::ingest
