#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tabaudit/audit.hpp"
#include "tabaudit/confound.hpp"
#include "tabaudit/http_backend.hpp"
#include "tabaudit/serialize.hpp"
#include "tabaudit/text.hpp"

namespace {

using namespace tabaudit;
using cli::RunManifest;

// Flag values; unset optionals leave the manifest value alone.
struct Flags {
  std::string config;
  std::vector<std::string> data;
  std::string name = "data";
  std::optional<std::string> backend;
  std::optional<std::string> model;
  std::optional<std::size_t> trials, window, fewshot, concurrency;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, cache, granularity, role_map;
  std::optional<double> noise_p;
  bool allow_overlap = false;
  bool include_header = false;
  bool yes = false;
};

void add_data_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "TOML-style run manifest");
  cmd->add_option("--data", f.data, "Dataset path or glob (repeatable)");
  cmd->add_option("--name", f.name, "Dataset name for --data inputs")->capture_default_str();
}

void add_plan_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--trials", f.trials, "Trials per file (default 25)");
  cmd->add_option("--window", f.window, "Rows per window (default 10)");
  cmd->add_option("--fewshot", f.fewshot, "Few-shot examples per trial (default 7)");
  cmd->add_option("--seed", f.seed, "Sampling seed (default 0)");
  cmd->add_flag("--allow-overlap", f.allow_overlap, "Let few-shot windows cover the test target");
}

void add_run_flags(CLI::App* cmd, Flags& f, bool backend_flag) {
  if (backend_flag) {
    cmd->add_option("--backend", f.backend, "http|replay|memorizer|copy|random|noisy")
        ->check(CLI::IsMember({"http", "replay", "memorizer", "copy", "random", "noisy"}));
  }
  cmd->add_option("--model", f.model, "Model id (default gpt-4)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--cache", f.cache, "Completion cache (JSON lines)");
  cmd->add_option("--granularity", f.granularity, "cell|char")
      ->check(CLI::IsMember({"cell", "char"}));
  cmd->add_option("--role-map", f.role_map, "user_assistant|user_system");
  cmd->add_option("--noise-p", f.noise_p, "Replacement probability for the noisy backend");
  cmd->add_option("--concurrency", f.concurrency, "Concurrent completions (default 4)");
  cmd->add_flag("--include-header", f.include_header, "Prepend the header line to prompts");
  cmd->add_flag("--yes,-y", f.yes, "Skip the cost confirmation for remote backends");
}

RunManifest build_manifest(const Flags& f) {
  RunManifest m = f.config.empty() ? RunManifest{} : cli::load_manifest(f.config);
  if (!f.data.empty()) m.datasets = {{f.name, f.data}};
  if (f.backend) m.backend = cli::parse_backend_kind(*f.backend);
  if (f.model) m.generation.model_id = *f.model;
  if (f.trials) m.audit.n_trials = *f.trials;
  if (f.window) m.audit.window_len = *f.window;
  if (f.fewshot) m.audit.n_fewshot = *f.fewshot;
  if (f.seed) m.audit.seed = *f.seed;
  if (f.allow_overlap) m.audit.allow_overlap = true;
  if (f.out) m.out_dir = *f.out;
  if (f.cache) m.cache = *f.cache;
  if (f.granularity) m.granularity = report::parse_granularity(*f.granularity);
  if (f.role_map) m.role_map = prompt::parse_role_map(*f.role_map);
  if (f.noise_p) m.noise_p = *f.noise_p;
  if (f.concurrency) m.concurrency = *f.concurrency;
  if (f.include_header) m.include_header = true;
  if (const char* url = std::getenv(backend::kBaseUrlEnv); url && *url) m.base_url = url;
  m.validate();
  return m;
}

void print_profile(const ingest::DatasetFile& file) {
  std::cout << file.source_name << ": " << file.row_count() << " rows, " << file.column_count
            << " columns, delimiter '" << (file.delimiter == '\t' ? std::string("\\t")
                                                                  : std::string(1, file.delimiter))
            << "'" << (file.header ? ", header" : "")
            << (file.non_canonical_spacing ? ", non-canonical spacing" : "") << "\n";
  for (const auto& c : ingest::profile_columns(file)) {
    std::cout << "  col " << c.index << ": distinct " << c.distinct_count << " ("
              << text::format_double(c.distinct_fraction) << "), max run " << c.max_run_length
              << (c.is_numeric ? ", numeric" : "") << "\n";
  }
  const auto dup = confound::duplicate_profile(file);
  std::cout << "  duplicate rows: " << dup.duplicate_rows << " ("
            << text::format_double(dup.duplicate_row_fraction) << ")\n";
}

void print_confound(const confound::ConfoundProfile& c) {
  std::cout << "copy_baseline_mean: " << text::format_double(c.copy_baseline_mean) << "\n"
            << "copy_baseline_best: " << text::format_double(c.copy_baseline_best) << "\n"
            << "duplicate_row_fraction: " << text::format_double(c.duplicate_row_fraction) << "\n";
  for (const auto& s : c.stuck_columns) {
    std::cout << "stuck: " << s.file_ref << " col " << s.index << " run " << s.max_run_length
              << "\n";
  }
  for (const auto& p : c.predictable_columns) {
    std::cout << "predictable: " << p.file_ref << " col " << p.index << " "
              << confound::to_string(p.column_class) << "\n";
  }
  for (const auto& f : c.column_analysis_skipped) {
    std::cout << "column analysis skipped: " << f << "\n";
  }
}

bool confirm(const std::string& dataset, const cli::CostEstimate& cost, bool yes) {
  std::cerr << dataset << ": " << cost.requests << " requests, about "
            << cost.approx_prompt_tokens() << " prompt tokens (" << cost.prompt_chars
            << " characters)\n";
  if (yes) return true;
  if (!::isatty(STDIN_FILENO)) {
    std::cerr << "remote backend needs --yes when stdin is not a terminal\n";
    return false;
  }
  std::cerr << "proceed? [y/N] ";
  std::string answer;
  std::getline(std::cin, answer);
  return answer == "y" || answer == "Y" || answer == "yes";
}

int report_runs(const std::vector<cli::DatasetRun>& runs) {
  for (const auto& r : runs) {
    if (r.report) {
      std::cout << r.dataset << ": " << confound::to_string(r.report->verdict.level)
                << " mean " << text::format_double(r.report->score.dataset_mean) << " copy "
                << text::format_double(r.report->confound.copy_baseline_mean) << " -> "
                << r.out_dir.string() << "\n";
    } else {
      std::cerr << "tabaudit: " << r.dataset << ": failed\n";
    }
    for (const auto& n : r.notes) std::cerr << "  " << n << "\n";
  }
  return cli::exit_code(runs);
}

int run_audit_cmd(const Flags& f, std::optional<cli::BackendKind> forced) {
  auto m = build_manifest(f);
  if (forced) m.backend = forced;
  if (!m.backend) throw Error(ErrorCode::kInvalidConfig, "choose a backend with --backend");
  m.validate();
  cli::RunHooks hooks;
  hooks.confirm_remote = [&](const std::string& ds, const cli::CostEstimate& c) {
    return confirm(ds, c, f.yes);
  };
  return report_runs(cli::run_audit(m, hooks));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabaudit: row-completion memorization audits for tabular sensor data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(report::tool_version()));

  Flags f;
  std::string plan_path, completions_path, input_path, format = "ansi", out_path;

  auto* inspect = app.add_subcommand("inspect", "Parse files; print column profiles and confound stats");
  add_data_flags(inspect, f);
  add_plan_flags(inspect, f);

  auto* plan = app.add_subcommand("plan", "Sample trial windows and write plan JSON");
  add_data_flags(plan, f);
  add_plan_flags(plan, f);
  plan->add_option("--out", out_path, "Plan file (default stdout)");

  auto* prompt_cmd = app.add_subcommand("prompt", "Assemble transcripts from a plan file");
  prompt_cmd->add_option("--plan", plan_path, "Plan JSON from `plan`")->required();
  prompt_cmd->add_option("--role-map", f.role_map, "user_assistant|user_system");
  prompt_cmd->add_option("--out", out_path, "Transcript JSON lines (default stdout)");

  auto* audit = app.add_subcommand("audit", "Full run: plan, prompt, complete, score, report");
  add_data_flags(audit, f);
  add_plan_flags(audit, f);
  add_run_flags(audit, f, true);

  auto* baseline = app.add_subcommand("baseline", "Copy baselines and confounds, no model calls");
  add_data_flags(baseline, f);
  add_plan_flags(baseline, f);

  auto* replay = app.add_subcommand("replay", "Re-run an audit from a completion cache");
  add_data_flags(replay, f);
  add_plan_flags(replay, f);
  add_run_flags(replay, f, false);

  auto* score = app.add_subcommand("score", "Score completions against a plan, offline");
  score->add_option("--config", f.config, "Run manifest for parse and scoring settings");
  score->add_option("--name", f.name, "Dataset name")->capture_default_str();
  score->add_option("--plan", plan_path, "Plan JSON")->required();
  score->add_option("--completions", completions_path, "Completion JSON lines")->required();
  score->add_option("--out", f.out, "Output directory");
  score->add_option("--granularity", f.granularity, "cell|char");

  auto* report_cmd = app.add_subcommand("report", "Verify and render a summary.json");
  report_cmd->add_option("--in", input_path, "summary.json")->required();
  report_cmd->add_option("--format", format, "ansi|html|json")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (inspect->parsed()) {
      const auto m = build_manifest(f);
      for (const auto& spec : m.datasets) {
        const auto b = cli::run_baseline(m, spec);
        std::cout << "[" << spec.name << "]\n";
        for (const auto& file : b.dataset.files) print_profile(*file.file);
        for (const auto& fail : b.dataset.failures) std::cerr << fail.note() << "\n";
        print_confound(b.confound);
      }
      return cli::kExitOk;
    }
    if (plan->parsed()) {
      const auto m = build_manifest(f);
      std::vector<sampling::TrialPlan> plans;
      int rc = cli::kExitOk;
      for (const auto& spec : m.datasets) {
        const auto ds = cli::prepare_dataset(m, spec);
        for (const auto& fail : ds.failures) {
          std::cerr << fail.note() << "\n";
          rc = cli::exit_code_for(fail.code);
        }
        for (const auto& p : ds.files) plans.push_back(p.plan);
      }
      const auto json = serialize::plans_to_json(plans);
      if (out_path.empty()) std::cout << json; else text::write_file(out_path, json);
      return rc;
    }
    if (prompt_cmd->parsed()) {
      const auto plans = serialize::plans_from_json(text::read_file_lossy(plan_path));
      prompt::TranscriptOptions options;
      if (f.role_map) options.role_map = prompt::parse_role_map(*f.role_map);
      std::string out;
      for (const auto& p : plans) {
        for (const auto& t : p.trials) out += serialize::transcript_to_jsonl(prompt::transcript_for(p, t, options));
      }
      if (out_path.empty()) std::cout << out; else text::write_file(out_path, out);
      return cli::kExitOk;
    }
    if (audit->parsed()) return run_audit_cmd(f, std::nullopt);
    if (replay->parsed()) {
      if (!f.cache && f.config.empty()) {
        throw Error(ErrorCode::kInvalidConfig, "replay needs --cache");
      }
      return run_audit_cmd(f, cli::BackendKind::kReplay);
    }
    if (baseline->parsed()) {
      const auto m = build_manifest(f);
      for (const auto& spec : m.datasets) {
        const auto b = cli::run_baseline(m, spec);
        std::cout << "[" << spec.name << "]\n";
        for (const auto& [file, mean] : b.confound.per_file_copy) {
          std::cout << file << ": " << text::format_double(mean) << "\n";
        }
        print_confound(b.confound);
      }
      return cli::kExitOk;
    }
    if (score->parsed()) {
      RunManifest m = f.config.empty() ? RunManifest{} : cli::load_manifest(f.config);
      if (f.out) m.out_dir = *f.out;
      if (f.granularity) m.granularity = report::parse_granularity(*f.granularity);
      const auto plans = serialize::plans_from_json(text::read_file_lossy(plan_path));
      if (!plans.empty()) m.audit = plans.front().config;
      const auto ds = cli::prepare_from_plans(m, f.name, plans);
      std::map<cli::CompletionKey, backend::CompletionResult> completions;
      for (const auto& rec : serialize::parse_jsonl(text::read_file_lossy(completions_path),
                                                    serialize::completion_from_json)) {
        completions[{rec.file_ref, rec.trial_id}] = rec.result;
      }
      const auto r = cli::score_dataset(m, ds, completions);
      const auto dir = m.out_dir / f.name;
      report::write_run_outputs(r, dir);
      std::cout << f.name << ": " << confound::to_string(r.verdict.level) << " mean "
                << text::format_double(r.score.dataset_mean) << " -> " << dir.string() << "\n";
      for (const auto& n : r.notes) std::cerr << "  " << n << "\n";
      return cli::kExitOk;
    }
    if (report_cmd->parsed()) {
      const auto fmt = report::parse_render_format(format);
      std::cout << report::render_report(report::load_results(input_path), fmt);
      return cli::kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "tabaudit: " << e.what() << "\n";
    return cli::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "tabaudit: " << e.what() << "\n";
    return cli::kExitOther;
  }
  return cli::kExitOther;
}
