#include "tabaudit/report.hpp"

#include <algorithm>
#include <set>

#include "canonical_json.hpp"
#include "report_json.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

#ifndef TABAUDIT_VERSION_STRING
#define TABAUDIT_VERSION_STRING "0.0.0"
#endif

namespace tabaudit::report {

using detail::Json;

namespace {

void push_segment(std::vector<DiffSegment>& segments, std::string text, Color color) {
  if (!segments.empty() && segments.back().color == color &&
      !(segments.back().text.starts_with('\n'))) {
    segments.back().text += text;
    return;
  }
  segments.push_back({std::move(text), color});
}

void diff_cells(std::string_view gt, std::string_view gen, char delimiter, RowDiff& d) {
  const auto gt_cells = text::split(gt, delimiter);
  const auto gen_cells = text::split(gen, delimiter);
  for (std::size_t k = 0; k < gen_cells.size(); ++k) {
    std::string piece = k == 0 ? gen_cells[k] : std::string(1, delimiter) + gen_cells[k];
    Color color = Color::kPurple;
    if (k < gt_cells.size()) color = gen_cells[k] == gt_cells[k] ? Color::kGreen : Color::kRed;
    // Cells stay separate segments so each value keeps its own color.
    d.segments.push_back({std::move(piece), color});
  }
  d.missing = gt_cells.size() > gen_cells.size() ? gt_cells.size() - gen_cells.size() : 0;
}

void diff_chars(std::string_view gt, std::string_view gen, RowDiff& d) {
  const auto a = text::to_scalars(gt);
  const auto b = text::to_scalars(gen);
  for (std::size_t k = 0; k < b.size(); ++k) {
    Color color = Color::kPurple;
    if (k < a.size()) color = a[k] == b[k] ? Color::kGreen : Color::kRed;
    push_segment(d.segments, text::from_scalars(std::u32string_view(&b[k], 1)), color);
  }
  d.missing = a.size() > b.size() ? a.size() - b.size() : 0;
}

}  // namespace

std::string_view to_string(Color c) noexcept {
  switch (c) {
    case Color::kGreen: return "green";
    case Color::kRed: return "red";
    case Color::kPurple: return "purple";
  }
  return "green";
}

std::string_view to_string(Granularity g) noexcept {
  return g == Granularity::kCell ? "cell" : "char";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "cell") return Granularity::kCell;
  if (name == "char") return Granularity::kChar;
  throw Error(ErrorCode::kInvalidConfig, "unknown granularity '" + std::string(name) + "'");
}

bool RowDiff::all_green() const noexcept {
  return missing == 0 && std::all_of(segments.begin(), segments.end(), [](const DiffSegment& s) {
           return s.color == Color::kGreen;
         });
}

RowDiff diff_row(std::string_view gt, std::string_view gen, std::span<const std::string> extra,
                 char delimiter, Granularity granularity) {
  RowDiff d;
  d.gt_row = std::string(gt);
  d.gen_row = std::string(gen);
  d.granularity = granularity;
  if (gen.empty()) {
    d.missing = granularity == Granularity::kCell ? text::split(gt, delimiter).size()
                                                  : text::scalar_length(gt);
    if (gt.empty()) d.missing = 0;
  } else if (granularity == Granularity::kCell) {
    diff_cells(gt, gen, delimiter, d);
  } else {
    diff_chars(gt, gen, d);
  }
  for (const auto& line : extra) d.segments.push_back({"\n" + line, Color::kPurple});
  return d;
}

std::string_view tool_version() noexcept { return TABAUDIT_VERSION_STRING; }

RenderFormat parse_render_format(std::string_view name) {
  if (name == "ansi") return RenderFormat::kAnsi;
  if (name == "html") return RenderFormat::kHtml;
  if (name == "json") return RenderFormat::kJson;
  throw Error(ErrorCode::kUnsupportedFormat, "unknown render format '" + std::string(name) + "'");
}

std::string trial_jsonl(const ReportTrial& trial) {
  return detail::canonical_dump(detail::trial_to_json(trial), false) + "\n";
}

AuditReport report_from_json(std::string_view text) {
  return detail::report_from_json_value(detail::parse_json(text));
}

void verify_integrity(const AuditReport& report) {
  auto mismatch = [](const std::string& what) {
    throw Error(ErrorCode::kIntegrityMismatch, what);
  };

  std::set<std::pair<std::string, std::size_t>> seen;
  std::map<std::string, std::vector<scoring::TrialScore>> by_file;
  for (const auto& t : report.trials) {
    const auto label = t.file_ref + "#" + std::to_string(t.score.trial_id);
    if (!seen.emplace(t.file_ref, t.score.trial_id).second) mismatch("duplicate trial " + label);
    const auto recomputed = scoring::rescore(t.score);
    if (recomputed.lev_dist != t.score.lev_dist) mismatch("lev_dist of " + label);
    if (recomputed.ratio != t.score.ratio) mismatch("ratio of " + label);
    if (recomputed.copy_ratio != t.score.copy_ratio) mismatch("copy_ratio of " + label);
    const auto diff = diff_row(t.score.ground_truth, t.score.generated_row, t.score.extra_lines,
                               t.delimiter, t.diff.granularity);
    if (diff != t.diff) mismatch("diff of " + label);
    by_file[t.file_ref].push_back(t.score);
  }
  if (!by_file.empty()) {
    if (scoring::aggregate_scores(by_file) != report.score) mismatch("dataset_score");
  }
  const auto verdict = confound::memorization_verdict(report.score, report.confound,
                                                      report.thresholds);
  if (verdict != report.verdict) mismatch("verdict");
}

AuditReport load_results(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kParseError, path.string() + " does not exist");
  }
  auto report = report_from_json(text::read_file_lossy(path));
  verify_integrity(report);
  return report;
}

void write_run_outputs(const AuditReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  text::write_file(dir / "summary.json", render_report(report, RenderFormat::kJson));
  std::string lines;
  for (const auto& t : report.trials) lines += trial_jsonl(t);
  text::write_file(dir / "trials.jsonl", lines);
  text::write_file(dir / "report.html", render_report(report, RenderFormat::kHtml));
}

}  // namespace tabaudit::report
