#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabaudit::ingest {

struct ParseConfig {
  char delimiter = ',';
  bool has_header = false;
  std::optional<std::string> comment_prefix;
  std::optional<std::size_t> expected_column_count;

  // Throws InvalidConfig unless the delimiter is one of , ' ' \t ; and the
  // expected column count, when set, is at least 1.
  void validate() const;

  bool operator==(const ParseConfig&) const = default;
};

bool is_supported_delimiter(char c) noexcept;

// Rows are kept byte-for-byte (minus line terminators) because completions are
// compared against file text; nothing here reformats numbers.
struct DatasetFile {
  std::string source_name;
  char delimiter = ',';
  std::optional<std::vector<std::string>> header;
  std::optional<std::string> header_line;
  std::vector<std::string> rows;
  std::vector<std::vector<std::string>> cells;
  // 1-based physical line of each row in the source text.
  std::vector<std::size_t> line_numbers;
  std::size_t column_count = 0;
  // Space-delimited file whose rows contain runs of spaces or leading/trailing
  // spaces. Cells are split on collapsed runs, so join(cells) != row; such
  // files are diffed per character and skip column analysis.
  bool non_canonical_spacing = false;

  std::size_t row_count() const noexcept { return rows.size(); }

  bool operator==(const DatasetFile&) const = default;
};

struct IncrementStats {
  // Distinct consecutive differences (rounded to 1e-9), ascending. Collection
  // stops after kMaxDistinct values and sets truncated.
  static constexpr std::size_t kMaxDistinct = 64;
  std::vector<double> deltas;
  bool truncated = false;
  double min_delta = 0.0;
  double max_delta = 0.0;

  bool strictly_monotone() const noexcept { return min_delta > 0.0 || max_delta < 0.0; }

  bool operator==(const IncrementStats&) const = default;
};

struct ColumnProfile {
  std::size_t index = 0;
  std::size_t value_count = 0;
  std::size_t distinct_count = 0;
  double distinct_fraction = 0.0;
  std::size_t max_run_length = 0;
  bool is_numeric = false;
  std::optional<IncrementStats> increment_stats;

  bool operator==(const ColumnProfile&) const = default;
};

// Picks the delimiter with the most consistent token count over the first 50
// non-comment lines. Lines starting with '#' are treated as comments.
ParseConfig infer_format(std::string_view raw_text);

DatasetFile parse_dataset_file(std::string_view raw_text, const ParseConfig& cfg,
                               std::string source_name = "<memory>");

// Reads the file lossily as UTF-8; infers the format unless cfg is given.
DatasetFile load_dataset_file(const std::filesystem::path& path,
                              const std::optional<ParseConfig>& cfg = std::nullopt);

std::vector<ColumnProfile> profile_columns(const DatasetFile& file);

// Splits one row the way parse_dataset_file does for the file's delimiter.
std::vector<std::string> split_row(std::string_view row, char delimiter);

}  // namespace tabaudit::ingest
