#include <sstream>

#include "canonical_json.hpp"
#include "report_json.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/report.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::report {
namespace {

constexpr std::string_view kReset = "\x1b[0m";

std::string_view ansi_code(Color c) {
  switch (c) {
    case Color::kGreen: return "\x1b[32m";
    case Color::kRed: return "\x1b[31m";
    case Color::kPurple: return "\x1b[35m";
  }
  return "";
}

std::string_view css_color(Color c) {
  switch (c) {
    case Color::kGreen: return "#1a7f37";
    case Color::kRed: return "#cf222e";
    case Color::kPurple: return "#8250df";
  }
  return "inherit";
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return text::format_double(v); }

void summary_lines(std::ostringstream& os, const AuditReport& r) {
  os << "dataset: " << r.dataset << "\n";
  os << "verdict: " << confound::to_string(r.verdict.level) << "\n";
  os << "dataset_mean: " << num(r.score.dataset_mean)
     << "  trial_weighted_mean: " << num(r.score.trial_weighted_mean)
     << "  trials: " << r.score.trial_count << "\n";
  os << "copy_baseline_mean: " << num(r.confound.copy_baseline_mean)
     << "  copy_baseline_best: " << num(r.confound.copy_baseline_best)
     << "  margin: " << num(r.verdict.margin) << "\n";
  os << "duplicate_row_fraction: " << num(r.confound.duplicate_row_fraction) << "\n";
  for (const auto& [file, mean] : r.score.per_file) {
    os << "  " << file << ": " << num(mean);
    if (auto it = r.confound.per_file_copy.find(file); it != r.confound.per_file_copy.end()) {
      os << " (copy " << num(it->second) << ")";
    }
    os << "\n";
  }
}

std::string render_ansi(const AuditReport& r) {
  std::ostringstream os;
  summary_lines(os, r);
  for (const auto& n : r.verdict.notes) os << "note: " << n << "\n";
  for (const auto& n : r.notes) os << "run: " << n << "\n";
  for (const auto& t : r.trials) {
    os << "\n" << t.file_ref << " trial " << t.score.trial_id << " row " << t.start_index
       << " ratio " << num(t.score.ratio) << "\n";
    os << "  truth: " << t.score.ground_truth << "\n";
    os << "  model: " << render_diff_ansi(t.diff) << "\n";
  }
  return os.str();
}

std::string render_html(const AuditReport& r) {
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>tabaudit: "
     << html_escape(r.dataset) << "</title></head>\n"
     << "<body style=\"font-family:sans-serif;margin:2em\">\n";
  os << "<h1>" << html_escape(r.dataset) << "</h1>\n<pre style=\"font-family:monospace\">";
  std::ostringstream summary;
  summary_lines(summary, r);
  os << html_escape(summary.str()) << "</pre>\n";
  if (!r.verdict.notes.empty() || !r.notes.empty()) {
    os << "<ul>\n";
    for (const auto& n : r.verdict.notes) os << "<li>" << html_escape(n) << "</li>\n";
    for (const auto& n : r.notes) os << "<li>" << html_escape(n) << "</li>\n";
    os << "</ul>\n";
  }
  os << "<table style=\"border-collapse:collapse;font-family:monospace\">\n"
     << "<tr><th style=\"text-align:left\">file</th><th>trial</th><th>row</th><th>ratio</th>"
        "<th style=\"text-align:left\">ground truth / generated</th></tr>\n";
  for (const auto& t : r.trials) {
    os << "<tr style=\"border-top:1px solid #ccc;vertical-align:top\"><td>"
       << html_escape(t.file_ref) << "</td><td>" << t.score.trial_id << "</td><td>"
       << t.start_index << "</td><td>" << num(t.score.ratio) << "</td><td>"
       << html_escape(t.score.ground_truth) << "<br>";
    for (const auto& seg : t.diff.segments) {
      std::string body = html_escape(seg.text);
      std::string with_breaks;
      for (char c : body) with_breaks += c == '\n' ? std::string("<br>") : std::string(1, c);
      os << "<span style=\"color:" << css_color(seg.color) << "\">" << with_breaks << "</span>";
    }
    os << "</td></tr>\n";
  }
  os << "</table>\n</body></html>\n";
  return os.str();
}

}  // namespace

std::string render_diff_ansi(const RowDiff& diff) {
  std::string out;
  for (const auto& seg : diff.segments) {
    out += ansi_code(seg.color);
    out += seg.text;
    out += kReset;
  }
  return out;
}

std::string render_report(const AuditReport& report, RenderFormat format) {
  switch (format) {
    case RenderFormat::kAnsi: return render_ansi(report);
    case RenderFormat::kHtml: return render_html(report);
    case RenderFormat::kJson: return detail::canonical_dump(detail::report_to_json(report), true);
  }
  throw Error(ErrorCode::kUnsupportedFormat, "unknown render format");
}

}  // namespace tabaudit::report
