#include "tabaudit/audit.hpp"

#include <glob.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#include "tabaudit/http_backend.hpp"
#include "tabaudit/serialize.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::cli {
namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kUnsupportedFormat:
    case ErrorCode::kAuthError:
      return kExitConfig;
    case ErrorCode::kNoConsistentDelimiter:
    case ErrorCode::kColumnCountMismatch:
    case ErrorCode::kEmptyAfterFiltering:
    case ErrorCode::kIoError:
    case ErrorCode::kParseError:
    case ErrorCode::kFileTooShort:
      return kExitParse;
    case ErrorCode::kNetworkError:
    case ErrorCode::kRateLimited:
    case ErrorCode::kServiceError:
      return kExitNetwork;
    default:
      return kExitOther;
  }
}

std::vector<std::filesystem::path> expand_patterns(const std::vector<std::string>& patterns,
                                                   std::vector<std::string>* missing) {
  std::vector<std::filesystem::path> out;
  std::set<std::string> seen;
  for (const auto& pattern : patterns) {
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    std::size_t matched = 0;
    if (rc == 0) {
      for (std::size_t i = 0; i < g.gl_pathc; ++i) {
        std::string p = g.gl_pathv[i];
        if (std::filesystem::is_directory(p)) continue;
        ++matched;
        if (seen.insert(p).second) out.emplace_back(std::move(p));
      }
    }
    ::globfree(&g);
    if (matched == 0 && missing) missing->push_back(pattern);
  }
  return out;
}

std::string FileFailure::note() const {
  return file_ref + ": " + message;
}

std::vector<std::shared_ptr<const ingest::DatasetFile>> PreparedDataset::dataset_files() const {
  std::vector<std::shared_ptr<const ingest::DatasetFile>> out;
  for (const auto& f : files) out.push_back(f.file);
  return out;
}

PreparedDataset prepare_dataset(const RunManifest& manifest, const DatasetSpec& spec) {
  PreparedDataset ds;
  ds.name = spec.name;
  std::vector<std::string> missing;
  const auto paths = expand_patterns(spec.patterns, &missing);
  for (const auto& m : missing) {
    const Error e(ErrorCode::kIoError, "no files match '" + m + "'");
    ds.failures.push_back({m, e.code(), e.what()});
  }
  const auto parse_cfg = manifest.parse_config_for(spec.name);
  for (const auto& path : paths) {
    try {
      auto file = std::make_shared<const ingest::DatasetFile>(
          ingest::load_dataset_file(path, parse_cfg));
      auto plan = sampling::build_trial_plan(*file, manifest.audit);
      ds.files.push_back({std::move(file), std::move(plan)});
    } catch (const Error& e) {
      ds.failures.push_back({path.string(), e.code(), e.what()});
    }
  }
  return ds;
}

PreparedDataset prepare_from_plans(const RunManifest& manifest, const std::string& name,
                                   const std::vector<sampling::TrialPlan>& plans) {
  PreparedDataset ds;
  ds.name = name;
  const auto parse_cfg = manifest.parse_config_for(name);
  for (const auto& plan : plans) {
    try {
      auto file = std::make_shared<const ingest::DatasetFile>(
          ingest::load_dataset_file(plan.file_ref, parse_cfg));
      auto check = [&](const sampling::WindowSample& w, std::size_t trial_id) {
        if (sampling::window_at(*file, w.start_index, w.prefix_rows.size()) != w) {
          throw Error(ErrorCode::kIntegrityMismatch,
                      "trial " + std::to_string(trial_id) + " does not match the file rows");
        }
      };
      for (const auto& trial : plan.trials) {
        check(trial.test, trial.trial_id);
        for (const auto& shot : trial.fewshot) check(shot, trial.trial_id);
      }
      ds.files.push_back({std::move(file), plan});
    } catch (const Error& e) {
      ds.failures.push_back({plan.file_ref, e.code(), e.what()});
    }
  }
  return ds;
}

prompt::TranscriptOptions transcript_options(const RunManifest& manifest,
                                             const ingest::DatasetFile& file) {
  prompt::TranscriptOptions o;
  o.role_map = manifest.role_map;
  if (manifest.include_header) o.header_line = file.header_line;
  return o;
}

std::vector<prompt::PromptTranscript> dataset_transcripts(const RunManifest& manifest,
                                                          const PreparedDataset& dataset) {
  std::vector<prompt::PromptTranscript> out;
  for (const auto& f : dataset.files) {
    const auto options = transcript_options(manifest, *f.file);
    for (const auto& trial : f.plan.trials) {
      out.push_back(prompt::transcript_for(f.plan, trial, options));
    }
  }
  return out;
}

CostEstimate estimate_cost(const std::vector<prompt::PromptTranscript>& transcripts) {
  CostEstimate c;
  c.requests = transcripts.size();
  for (const auto& t : transcripts) {
    for (const auto& m : t.messages) c.prompt_chars += m.content.size();
  }
  return c;
}

std::vector<CompletionOutcome> complete_all(backend::CompletionBackend& backend,
                                            const std::vector<prompt::PromptTranscript>& transcripts,
                                            const backend::GenParams& params,
                                            std::size_t concurrency) {
  std::vector<CompletionOutcome> outcomes(transcripts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= transcripts.size()) return;
      try {
        outcomes[i].result = backend.complete(transcripts[i], params);
      } catch (const Error& e) {
        outcomes[i].error = e;
      } catch (const std::exception& e) {
        outcomes[i].error = Error(ErrorCode::kServiceError, e.what());
      }
    }
  };
  const auto n = std::max<std::size_t>(1, std::min(concurrency, transcripts.size()));
  if (n == 1) {
    worker();
    return outcomes;
  }
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  pool.clear();
  return outcomes;
}

report::AuditReport score_dataset(const RunManifest& manifest, const PreparedDataset& dataset,
                                  const std::map<CompletionKey, backend::CompletionResult>& completions,
                                  std::vector<FileFailure> failures) {
  report::AuditReport r;
  r.dataset = dataset.name;
  r.audit = manifest.audit;
  r.generation = manifest.generation;
  r.thresholds = manifest.thresholds;
  r.granularity = manifest.granularity;
  r.role_map = manifest.role_map;
  r.extract = manifest.extract;
  r.provenance.tool_version = std::string(report::tool_version());

  for (const auto& f : dataset.failures) failures.push_back(f);
  std::set<std::string> failed;
  for (const auto& f : failures) failed.insert(f.file_ref);

  std::map<std::string, std::vector<scoring::TrialScore>> by_file;
  std::vector<confound::FileAudit> audits;
  std::vector<std::string> backend_ids, generator_ids, timestamps;
  for (const auto& f : dataset.files) {
    const auto& ref = f.plan.file_ref;
    if (failed.count(ref)) continue;
    const bool all_present = std::all_of(
        f.plan.trials.begin(), f.plan.trials.end(),
        [&](const sampling::Trial& t) { return completions.count({ref, t.trial_id}) > 0; });
    if (!all_present) {
      failures.push_back({ref, ErrorCode::kCacheMiss, "CacheMiss: no completion for some trials"});
      continue;
    }
    const auto granularity =
        f.file->non_canonical_spacing ? report::Granularity::kChar : manifest.granularity;
    for (const auto& t : f.plan.trials) {
      const auto& c = completions.at({ref, t.trial_id});
      auto score = scoring::score_trial(t.trial_id, t.test.target_row, c,
                                        t.test.prefix_rows.back(), manifest.extract);
      report::ReportTrial rt;
      rt.file_ref = ref;
      rt.start_index = t.test.start_index;
      rt.delimiter = f.file->delimiter;
      rt.diff = report::diff_row(score.ground_truth, score.generated_row, score.extra_lines,
                                 rt.delimiter, granularity);
      rt.score = score;
      by_file[ref].push_back(std::move(score));
      r.trials.push_back(std::move(rt));
      backend_ids.push_back(c.backend_id);
      if (!c.timestamp.empty()) timestamps.push_back(c.timestamp);
    }
    generator_ids.push_back(f.plan.generator_id);
    audits.push_back({*f.file, f.plan});
  }

  for (const auto& n : dataset.notes) r.notes.push_back(n);
  for (const auto& f : failures) r.notes.push_back(f.note());
  if (by_file.empty()) {
    throw Error(failures.empty() ? ErrorCode::kNoTrials : failures.front().code,
                "dataset '" + dataset.name + "': no file produced scored trials" +
                    (failures.empty() ? std::string() : " (" + failures.front().note() + ")"));
  }

  std::sort(r.trials.begin(), r.trials.end(), [](const auto& a, const auto& b) {
    return std::tie(a.file_ref, a.score.trial_id) < std::tie(b.file_ref, b.score.trial_id);
  });
  r.score = scoring::aggregate_scores(by_file);
  r.confound = confound::profile_confounds(audits, manifest.thresholds);
  r.verdict = confound::memorization_verdict(r.score, r.confound, manifest.thresholds);

  r.provenance.backend_id = text::join(sorted_unique(backend_ids), "+");
  r.provenance.generator_id = text::join(sorted_unique(generator_ids), "+");
  if (!timestamps.empty()) {
    const auto [lo, hi] = std::minmax_element(timestamps.begin(), timestamps.end());
    r.provenance.first_completion_at = *lo;
    r.provenance.last_completion_at = *hi;
  } else {
    r.provenance.first_completion_at = r.provenance.last_completion_at = "unknown";
  }
  if (r.provenance.backend_id.empty()) r.provenance.backend_id = "unknown";
  return r;
}

std::shared_ptr<backend::CompletionBackend> make_backend(
    const RunManifest& manifest, std::shared_ptr<const backend::FileSet> files,
    std::shared_ptr<backend::CompletionCache> cache) {
  if (!manifest.backend) throw Error(ErrorCode::kInvalidConfig, "no backend selected");
  std::shared_ptr<backend::CompletionBackend> inner;
  switch (*manifest.backend) {
    case BackendKind::kReplay:
      if (!cache) throw Error(ErrorCode::kInvalidConfig, "replay backend needs a cache file");
      return std::make_shared<backend::ReplayBackend>(cache);
    case BackendKind::kMemorizer:
      inner = std::make_shared<backend::MemorizerBackend>(std::move(files));
      break;
    case BackendKind::kCopy:
      inner = std::make_shared<backend::CopyLastBackend>();
      break;
    case BackendKind::kRandom:
      inner = std::make_shared<backend::RandomBackend>(manifest.audit.seed);
      break;
    case BackendKind::kNoisy:
      inner = std::make_shared<backend::NoisyMemorizerBackend>(std::move(files), manifest.noise_p,
                                                               manifest.audit.seed);
      break;
    case BackendKind::kHttp: {
      backend::HttpChatOptions o;
      o.base_url = manifest.base_url;
      const char* key = std::getenv(backend::kApiKeyEnv);
      if (!key || !*key) {
        throw Error(ErrorCode::kInvalidConfig,
                    std::string("http backend needs ") + backend::kApiKeyEnv);
      }
      o.api_key = key;
      o.jitter_seed = manifest.audit.seed;
      inner = std::make_shared<backend::HttpChatBackend>(std::move(o));
      break;
    }
  }
  if (cache) return std::make_shared<backend::RecordingBackend>(inner, cache);
  return inner;
}

std::vector<DatasetRun> run_audit(const RunManifest& manifest, const RunHooks& hooks) {
  manifest.validate();
  std::shared_ptr<backend::CompletionCache> cache;
  if (manifest.cache) cache = std::make_shared<backend::CompletionCache>(*manifest.cache);

  std::vector<DatasetRun> runs;
  for (const auto& spec : manifest.datasets) {
    DatasetRun run;
    run.dataset = spec.name;
    run.out_dir = manifest.out_dir / spec.name;
    const auto prepared = prepare_dataset(manifest, spec);
    auto files = std::make_shared<const backend::FileSet>(prepared.dataset_files());
    auto backend = hooks.backend_factory ? hooks.backend_factory(manifest, files, cache)
                                         : make_backend(manifest, files, cache);

    const auto transcripts = dataset_transcripts(manifest, prepared);
    if (backend->is_remote() && hooks.confirm_remote &&
        !hooks.confirm_remote(spec.name, estimate_cost(transcripts))) {
      run.failure = ErrorCode::kInvalidConfig;
      run.notes.push_back("cancelled before contacting the remote backend");
      runs.push_back(std::move(run));
      continue;
    }

    const auto outcomes =
        complete_all(*backend, transcripts, manifest.generation, manifest.concurrency);
    std::map<CompletionKey, backend::CompletionResult> completions;
    std::vector<FileFailure> failures;
    std::set<std::string> failed;
    std::string completions_jsonl;
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
      const auto& t = transcripts[i];
      if (outcomes[i].result) {
        completions.emplace(CompletionKey{t.file_ref, t.trial_id}, *outcomes[i].result);
        completions_jsonl += serialize::completion_to_jsonl({t.file_ref, t.trial_id, *outcomes[i].result});
      } else if (failed.insert(t.file_ref).second) {
        failures.push_back({t.file_ref, outcomes[i].error->code(),
                            "trial " + std::to_string(t.trial_id) + ": " + outcomes[i].error->what()});
      }
    }

    try {
      auto report = score_dataset(manifest, prepared, completions, failures);
      report::write_run_outputs(report, run.out_dir);
      std::vector<sampling::TrialPlan> plans;
      for (const auto& f : prepared.files) plans.push_back(f.plan);
      text::write_file(run.out_dir / "plan.json", serialize::plans_to_json(plans));
      std::string transcripts_jsonl;
      for (const auto& t : transcripts) transcripts_jsonl += serialize::transcript_to_jsonl(t);
      text::write_file(run.out_dir / "transcripts.jsonl", transcripts_jsonl);
      text::write_file(run.out_dir / "completions.jsonl", completions_jsonl);
      run.notes = report.notes;
      run.report = std::move(report);
    } catch (const Error& e) {
      run.failure = e.code();
      run.notes.push_back(e.what());
      for (const auto& f : prepared.failures) run.notes.push_back(f.note());
      for (const auto& f : failures) run.notes.push_back(f.note());
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

int exit_code(const std::vector<DatasetRun>& runs) noexcept {
  for (const auto& r : runs) {
    if (r.failure) return exit_code_for(*r.failure);
  }
  return kExitOk;
}

BaselineRun run_baseline(const RunManifest& manifest, const DatasetSpec& spec) {
  BaselineRun out;
  out.dataset = prepare_dataset(manifest, spec);
  if (out.dataset.files.empty()) {
    const auto code =
        out.dataset.failures.empty() ? ErrorCode::kNoTrials : out.dataset.failures.front().code;
    throw Error(code, "dataset '" + spec.name + "': no usable files");
  }
  std::vector<confound::FileAudit> audits;
  for (const auto& f : out.dataset.files) audits.push_back({*f.file, f.plan});
  out.confound = confound::profile_confounds(audits, manifest.thresholds);
  return out;
}

}  // namespace tabaudit::cli
