#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/backend.hpp"
#include "tabaudit/confound.hpp"
#include "tabaudit/prompt.hpp"
#include "tabaudit/sampler.hpp"
#include "tabaudit/scoring.hpp"

namespace tabaudit::report {

enum class Color { kGreen, kRed, kPurple };
enum class Granularity { kCell, kChar };

std::string_view to_string(Color c) noexcept;
std::string_view to_string(Granularity g) noexcept;
Granularity parse_granularity(std::string_view name);

struct DiffSegment {
  std::string text;
  Color color = Color::kGreen;

  bool operator==(const DiffSegment&) const = default;
};

// Segments concatenate to the generated row followed by "\n" + line for each
// extra line. In cell mode every cell after the first carries its leading
// delimiter, so the green and red segments concatenate to the scored part of
// the generated row.
struct RowDiff {
  std::vector<DiffSegment> segments;
  std::string gt_row;
  std::string gen_row;
  Granularity granularity = Granularity::kCell;
  // Ground-truth cells (or characters) the generated row did not reach.
  std::size_t missing = 0;

  bool all_green() const noexcept;

  bool operator==(const RowDiff&) const = default;
};

RowDiff diff_row(std::string_view gt, std::string_view gen, std::span<const std::string> extra,
                 char delimiter, Granularity granularity = Granularity::kCell);

struct ReportTrial {
  std::string file_ref;
  std::size_t start_index = 0;
  char delimiter = ',';
  scoring::TrialScore score;
  RowDiff diff;

  bool operator==(const ReportTrial&) const = default;
};

struct Provenance {
  std::string tool_version;
  std::string generator_id;
  std::string backend_id;
  // Earliest and latest completion timestamps.
  std::string first_completion_at;
  std::string last_completion_at;

  bool operator==(const Provenance&) const = default;
};

struct AuditReport {
  std::string dataset;
  sampling::AuditConfig audit;
  backend::GenParams generation;
  confound::Thresholds thresholds;
  Granularity granularity = Granularity::kCell;
  prompt::RoleMap role_map = prompt::RoleMap::kUserAssistant;
  scoring::ExtractOptions extract;
  scoring::DatasetScore score;
  confound::ConfoundProfile confound;
  confound::Verdict verdict;
  std::vector<ReportTrial> trials;
  Provenance provenance;
  // Per-file failures and other run notes.
  std::vector<std::string> notes;

  bool operator==(const AuditReport&) const = default;
};

std::string_view tool_version() noexcept;

enum class RenderFormat { kAnsi, kHtml, kJson };

RenderFormat parse_render_format(std::string_view name);  // throws UnsupportedFormat
std::string render_report(const AuditReport& report, RenderFormat format);
std::string render_diff_ansi(const RowDiff& diff);

// One compact canonical JSON object per trial, newline-terminated.
std::string trial_jsonl(const ReportTrial& trial);

AuditReport report_from_json(std::string_view text);
// Parses and verifies: every stored ratio, distance, diff, aggregate and the
// verdict must re-derive from the stored strings and configuration.
AuditReport load_results(const std::filesystem::path& path);
void verify_integrity(const AuditReport& report);

// <dir>/summary.json, <dir>/trials.jsonl, <dir>/report.html
void write_run_outputs(const AuditReport& report, const std::filesystem::path& dir);

}  // namespace tabaudit::report
