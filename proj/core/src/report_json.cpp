#include "report_json.hpp"

#include "tabaudit/error.hpp"

namespace tabaudit::detail {
namespace {

constexpr const char* kSummarySchema = "tabaudit.summary/v1";

std::string delimiter_name(char c) { return std::string(1, c); }

char delimiter_from(const Json& j, const char* key) {
  const auto s = get_string(j, key);
  if (s.size() != 1) throw Error(ErrorCode::kParseError, std::string(key) + " must be one char");
  return s[0];
}

std::vector<std::string> string_list(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_array()) throw Error(ErrorCode::kParseError, std::string(key) + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) throw Error(ErrorCode::kParseError, std::string(key) + " items");
    out.push_back(item.get<std::string>());
  }
  return out;
}

template <typename T>
std::map<std::string, T> number_map(const Json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_object()) throw Error(ErrorCode::kParseError, std::string(key) + " must be an object");
  std::map<std::string, T> out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_number()) throw Error(ErrorCode::kParseError, std::string(key) + " values");
    out[it.key()] = it.value().get<T>();
  }
  return out;
}

Json gen_params_to_json(const backend::GenParams& g) {
  return {{"model_id", g.model_id},
          {"temperature", g.temperature},
          {"max_output_tokens", g.max_output_tokens},
          {"timeout_ms", g.timeout.count()}};
}

backend::GenParams gen_params_from_json(const Json& j) {
  backend::GenParams g;
  g.model_id = get_string(j, "model_id");
  g.temperature = get_double(j, "temperature");
  g.max_output_tokens = get_int(j, "max_output_tokens");
  g.timeout = std::chrono::milliseconds(get_int(j, "timeout_ms"));
  return g;
}

Json thresholds_to_json(const confound::Thresholds& t) {
  return {{"margin_min", t.margin_min},
          {"confound_dup", t.confound_dup},
          {"min_run", t.min_run},
          {"label_max_cardinality", t.label_max_cardinality},
          {"label_min_run", t.label_min_run}};
}

confound::Thresholds thresholds_from_json(const Json& j) {
  confound::Thresholds t;
  t.margin_min = get_double(j, "margin_min");
  t.confound_dup = get_double(j, "confound_dup");
  t.min_run = get_uint(j, "min_run");
  t.label_max_cardinality = get_uint(j, "label_max_cardinality");
  t.label_min_run = get_uint(j, "label_min_run");
  return t;
}

Json score_to_json(const scoring::DatasetScore& s) {
  Json per_file = Json::object();
  for (const auto& [k, v] : s.per_file) per_file[k] = v;
  Json per_file_trials = Json::object();
  for (const auto& [k, v] : s.per_file_trials) per_file_trials[k] = v;
  return {{"per_file", per_file},
          {"per_file_trials", per_file_trials},
          {"dataset_mean", s.dataset_mean},
          {"trial_weighted_mean", s.trial_weighted_mean},
          {"trial_count", s.trial_count}};
}

scoring::DatasetScore score_from_json(const Json& j) {
  scoring::DatasetScore s;
  s.per_file = number_map<double>(j, "per_file");
  s.per_file_trials = number_map<std::size_t>(j, "per_file_trials");
  s.dataset_mean = get_double(j, "dataset_mean");
  s.trial_weighted_mean = get_double(j, "trial_weighted_mean");
  s.trial_count = get_uint(j, "trial_count");
  return s;
}

Json confound_to_json(const confound::ConfoundProfile& c) {
  Json stuck = Json::array();
  for (const auto& s : c.stuck_columns) {
    stuck.push_back(
        {{"file_ref", s.file_ref}, {"index", s.index}, {"max_run_length", s.max_run_length}});
  }
  Json predictable = Json::array();
  for (const auto& p : c.predictable_columns) {
    predictable.push_back({{"file_ref", p.file_ref},
                           {"index", p.index},
                           {"class", confound::to_string(p.column_class)}});
  }
  Json per_file_copy = Json::object();
  for (const auto& [k, v] : c.per_file_copy) per_file_copy[k] = v;
  Json per_file_dup = Json::object();
  for (const auto& [k, d] : c.per_file_duplicates) {
    Json hist = Json::object();
    for (const auto& [len, count] : d.run_length_histogram) hist[std::to_string(len)] = count;
    per_file_dup[k] = {{"row_count", d.row_count},
                       {"duplicate_rows", d.duplicate_rows},
                       {"duplicate_row_fraction", d.duplicate_row_fraction},
                       {"run_length_histogram", hist}};
  }
  return {{"copy_baseline_mean", c.copy_baseline_mean},
          {"copy_baseline_best", c.copy_baseline_best},
          {"duplicate_row_fraction", c.duplicate_row_fraction},
          {"stuck_columns", stuck},
          {"predictable_columns", predictable},
          {"per_trial_copy", c.per_trial_copy},
          {"per_file_copy", per_file_copy},
          {"per_file_duplicates", per_file_dup},
          {"column_analysis_skipped", c.column_analysis_skipped}};
}

confound::ConfoundProfile confound_from_json(const Json& j) {
  confound::ConfoundProfile c;
  c.copy_baseline_mean = get_double(j, "copy_baseline_mean");
  c.copy_baseline_best = get_double(j, "copy_baseline_best");
  c.duplicate_row_fraction = get_double(j, "duplicate_row_fraction");
  for (const auto& s : require(j, "stuck_columns")) {
    c.stuck_columns.push_back(
        {get_string(s, "file_ref"), get_uint(s, "index"), get_uint(s, "max_run_length")});
  }
  for (const auto& p : require(j, "predictable_columns")) {
    c.predictable_columns.push_back({get_string(p, "file_ref"), get_uint(p, "index"),
                                     confound::parse_column_class(get_string(p, "class"))});
  }
  for (const auto& v : require(j, "per_trial_copy")) {
    if (!v.is_number()) throw Error(ErrorCode::kParseError, "per_trial_copy values");
    c.per_trial_copy.push_back(v.get<double>());
  }
  c.per_file_copy = number_map<double>(j, "per_file_copy");
  const auto& dup = require(j, "per_file_duplicates");
  for (auto it = dup.begin(); it != dup.end(); ++it) {
    confound::DuplicateProfile d;
    d.row_count = get_uint(it.value(), "row_count");
    d.duplicate_rows = get_uint(it.value(), "duplicate_rows");
    d.duplicate_row_fraction = get_double(it.value(), "duplicate_row_fraction");
    for (const auto& [len, count] :
         number_map<std::size_t>(it.value(), "run_length_histogram")) {
      d.run_length_histogram[std::stoull(len)] = count;
    }
    c.per_file_duplicates[it.key()] = std::move(d);
  }
  c.column_analysis_skipped = string_list(j, "column_analysis_skipped");
  return c;
}

Json verdict_to_json(const confound::Verdict& v) {
  return {{"level", confound::to_string(v.level)},
          {"llm_score", v.llm_score},
          {"copy_baseline", v.copy_baseline},
          {"margin", v.margin},
          {"notes", v.notes}};
}

confound::Verdict verdict_from_json(const Json& j) {
  confound::Verdict v;
  v.level = confound::parse_verdict_level(get_string(j, "level"));
  v.llm_score = get_double(j, "llm_score");
  v.copy_baseline = get_double(j, "copy_baseline");
  v.margin = get_double(j, "margin");
  v.notes = string_list(j, "notes");
  return v;
}

Json diff_to_json(const report::RowDiff& d) {
  Json segments = Json::array();
  for (const auto& s : d.segments) {
    segments.push_back({{"text", s.text}, {"color", report::to_string(s.color)}});
  }
  return {{"granularity", report::to_string(d.granularity)},
          {"missing", d.missing},
          {"segments", segments}};
}

report::Color color_from(const std::string& s) {
  if (s == "green") return report::Color::kGreen;
  if (s == "red") return report::Color::kRed;
  if (s == "purple") return report::Color::kPurple;
  throw Error(ErrorCode::kParseError, "unknown color '" + s + "'");
}

}  // namespace

Json audit_config_to_json(const sampling::AuditConfig& c) {
  return {{"window_len", c.window_len},
          {"n_fewshot", c.n_fewshot},
          {"n_trials", c.n_trials},
          {"seed", c.seed},
          {"allow_overlap", c.allow_overlap}};
}

sampling::AuditConfig audit_config_from_json(const Json& j) {
  sampling::AuditConfig c;
  c.window_len = get_uint(j, "window_len");
  c.n_fewshot = get_uint(j, "n_fewshot");
  c.n_trials = get_uint(j, "n_trials");
  c.seed = get_uint(j, "seed");
  c.allow_overlap = get_bool(j, "allow_overlap");
  return c;
}

Json window_to_json(const sampling::WindowSample& w) {
  return {{"start_index", w.start_index},
          {"prefix_rows", w.prefix_rows},
          {"target_row", w.target_row}};
}

sampling::WindowSample window_from_json(const Json& j) {
  sampling::WindowSample w;
  w.start_index = get_uint(j, "start_index");
  w.prefix_rows = string_list(j, "prefix_rows");
  w.target_row = get_string(j, "target_row");
  return w;
}

Json plan_to_json(const sampling::TrialPlan& plan) {
  Json trials = Json::array();
  for (const auto& t : plan.trials) {
    Json fewshot = Json::array();
    for (const auto& w : t.fewshot) fewshot.push_back(window_to_json(w));
    trials.push_back(
        {{"trial_id", t.trial_id}, {"test", window_to_json(t.test)}, {"fewshot", fewshot}});
  }
  return {{"file_ref", plan.file_ref},
          {"generator_id", plan.generator_id},
          {"config", audit_config_to_json(plan.config)},
          {"trials", trials}};
}

sampling::TrialPlan plan_from_json(const Json& j) {
  sampling::TrialPlan plan;
  plan.file_ref = get_string(j, "file_ref");
  plan.generator_id = get_string(j, "generator_id");
  plan.config = audit_config_from_json(require(j, "config"));
  for (const auto& t : require(j, "trials")) {
    sampling::Trial trial;
    trial.trial_id = get_uint(t, "trial_id");
    trial.test = window_from_json(require(t, "test"));
    for (const auto& w : require(t, "fewshot")) trial.fewshot.push_back(window_from_json(w));
    plan.trials.push_back(std::move(trial));
  }
  return plan;
}

Json transcript_to_json(const prompt::PromptTranscript& t) {
  Json messages = Json::array();
  for (const auto& m : t.messages) {
    messages.push_back({{"role", prompt::to_string(m.role)}, {"content", m.content}});
  }
  return {{"file_ref", t.file_ref}, {"trial_id", t.trial_id}, {"messages", messages}};
}

prompt::PromptTranscript transcript_from_json(const Json& j) {
  prompt::PromptTranscript t;
  t.file_ref = get_string(j, "file_ref");
  t.trial_id = get_uint(j, "trial_id");
  for (const auto& m : require(j, "messages")) {
    t.messages.push_back({prompt::parse_role(get_string(m, "role")), get_string(m, "content")});
  }
  return t;
}

Json trial_to_json(const report::ReportTrial& t) {
  const auto& s = t.score;
  return {{"file_ref", t.file_ref},
          {"trial_id", s.trial_id},
          {"start_index", t.start_index},
          {"delimiter", delimiter_name(t.delimiter)},
          {"ground_truth", s.ground_truth},
          {"generated_row", s.generated_row},
          {"extra_lines", s.extra_lines},
          {"lev_dist", s.lev_dist},
          {"ratio", s.ratio},
          {"copy_source", s.copy_source},
          {"copy_ratio", s.copy_ratio},
          {"empty_completion", s.empty_completion},
          {"diff", diff_to_json(t.diff)}};
}

report::ReportTrial trial_from_json(const Json& j) {
  report::ReportTrial t;
  t.file_ref = get_string(j, "file_ref");
  t.start_index = get_uint(j, "start_index");
  t.delimiter = delimiter_from(j, "delimiter");
  auto& s = t.score;
  s.trial_id = get_uint(j, "trial_id");
  s.ground_truth = get_string(j, "ground_truth");
  s.generated_row = get_string(j, "generated_row");
  s.extra_lines = string_list(j, "extra_lines");
  s.lev_dist = get_uint(j, "lev_dist");
  s.ratio = get_double(j, "ratio");
  s.copy_source = get_string(j, "copy_source");
  s.copy_ratio = get_double(j, "copy_ratio");
  s.empty_completion = get_bool(j, "empty_completion");
  const auto& d = require(j, "diff");
  t.diff.gt_row = s.ground_truth;
  t.diff.gen_row = s.generated_row;
  t.diff.granularity = report::parse_granularity(get_string(d, "granularity"));
  t.diff.missing = get_uint(d, "missing");
  for (const auto& seg : require(d, "segments")) {
    t.diff.segments.push_back({get_string(seg, "text"), color_from(get_string(seg, "color"))});
  }
  return t;
}

Json report_to_json(const report::AuditReport& r) {
  Json trials = Json::array();
  for (const auto& t : r.trials) trials.push_back(trial_to_json(t));
  return {
      {"schema", kSummarySchema},
      {"dataset", r.dataset},
      {"config",
       {{"audit", audit_config_to_json(r.audit)},
        {"generation", gen_params_to_json(r.generation)},
        {"thresholds", thresholds_to_json(r.thresholds)},
        {"granularity", report::to_string(r.granularity)},
        {"role_map", prompt::to_string(r.role_map)},
        {"extract",
         {{"strip_fences", r.extract.strip_fences},
          {"trim_whitespace", r.extract.trim_whitespace}}}}},
      {"dataset_score", score_to_json(r.score)},
      {"confound", confound_to_json(r.confound)},
      {"verdict", verdict_to_json(r.verdict)},
      {"trials", trials},
      {"provenance",
       {{"tool_version", r.provenance.tool_version},
        {"generator_id", r.provenance.generator_id},
        {"backend_id", r.provenance.backend_id},
        {"first_completion_at", r.provenance.first_completion_at},
        {"last_completion_at", r.provenance.last_completion_at}}},
      {"notes", r.notes},
  };
}

report::AuditReport report_from_json_value(const Json& j) {
  if (get_string(j, "schema") != kSummarySchema) {
    throw Error(ErrorCode::kParseError, "unsupported summary schema");
  }
  report::AuditReport r;
  r.dataset = get_string(j, "dataset");
  const auto& cfg = require(j, "config");
  r.audit = audit_config_from_json(require(cfg, "audit"));
  r.generation = gen_params_from_json(require(cfg, "generation"));
  r.thresholds = thresholds_from_json(require(cfg, "thresholds"));
  r.granularity = report::parse_granularity(get_string(cfg, "granularity"));
  try {
    r.role_map = prompt::parse_role_map(get_string(cfg, "role_map"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  const auto& extract = require(cfg, "extract");
  r.extract.strip_fences = get_bool(extract, "strip_fences");
  r.extract.trim_whitespace = get_bool(extract, "trim_whitespace");
  r.score = score_from_json(require(j, "dataset_score"));
  r.confound = confound_from_json(require(j, "confound"));
  r.verdict = verdict_from_json(require(j, "verdict"));
  for (const auto& t : require(j, "trials")) r.trials.push_back(trial_from_json(t));
  const auto& p = require(j, "provenance");
  r.provenance.tool_version = get_string(p, "tool_version");
  r.provenance.generator_id = get_string(p, "generator_id");
  r.provenance.backend_id = get_string(p, "backend_id");
  r.provenance.first_completion_at = get_string(p, "first_completion_at");
  r.provenance.last_completion_at = get_string(p, "last_completion_at");
  r.notes = string_list(j, "notes");
  return r;
}

}  // namespace tabaudit::detail
