#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabaudit/backend.hpp"
#include "tabaudit/cache.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/manifest.hpp"
#include "tabaudit/report.hpp"

namespace tabaudit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitParse = 3,
  kExitNetwork = 4,
};

int exit_code_for(ErrorCode code) noexcept;

// Sorted matches of each pattern, first occurrence kept. A pattern matching
// nothing is reported in `missing`.
std::vector<std::filesystem::path> expand_patterns(const std::vector<std::string>& patterns,
                                                   std::vector<std::string>* missing = nullptr);

struct PlannedFile {
  std::shared_ptr<const ingest::DatasetFile> file;
  sampling::TrialPlan plan;
};

struct FileFailure {
  std::string file_ref;
  ErrorCode code;
  // Error::what(), which leads with the code name.
  std::string message;

  std::string note() const;
};

// Files that parsed and planned, plus the ones that did not.
struct PreparedDataset {
  std::string name;
  std::vector<PlannedFile> files;
  std::vector<FileFailure> failures;
  std::vector<std::string> notes;

  std::vector<std::shared_ptr<const ingest::DatasetFile>> dataset_files() const;
};

PreparedDataset prepare_dataset(const RunManifest& manifest, const DatasetSpec& spec);

// Rebuilds a dataset from stored plans: each plan's file_ref is reparsed and
// the plan's windows must match the file's rows.
PreparedDataset prepare_from_plans(const RunManifest& manifest, const std::string& name,
                                   const std::vector<sampling::TrialPlan>& plans);

prompt::TranscriptOptions transcript_options(const RunManifest& manifest,
                                             const ingest::DatasetFile& file);

// Transcripts in plan order: files in order, trials in order.
std::vector<prompt::PromptTranscript> dataset_transcripts(const RunManifest& manifest,
                                                          const PreparedDataset& dataset);

struct CostEstimate {
  std::size_t requests = 0;
  std::size_t prompt_chars = 0;
  // prompt_chars / 4, the usual rough characters-per-token figure.
  std::size_t approx_prompt_tokens() const noexcept { return prompt_chars / 4; }
};

CostEstimate estimate_cost(const std::vector<prompt::PromptTranscript>& transcripts);

struct CompletionOutcome {
  std::optional<backend::CompletionResult> result;
  std::optional<Error> error;
};

// Runs complete() for every transcript on up to `concurrency` workers.
// Outcomes come back in input order whatever order the calls finish in.
std::vector<CompletionOutcome> complete_all(backend::CompletionBackend& backend,
                                            const std::vector<prompt::PromptTranscript>& transcripts,
                                            const backend::GenParams& params,
                                            std::size_t concurrency);

using CompletionKey = std::pair<std::string, std::size_t>;  // (file_ref, trial_id)

// Scores every trial that has a completion; a file with any trial missing is
// dropped and noted. Throws NoTrials when no file survives.
report::AuditReport score_dataset(const RunManifest& manifest, const PreparedDataset& dataset,
                                  const std::map<CompletionKey, backend::CompletionResult>& completions,
                                  std::vector<FileFailure> extra_failures = {});

// Memorizer/copy/random/noisy/http/replay per the manifest. A cache, when
// given, wraps every backend except replay in a read-through recorder.
std::shared_ptr<backend::CompletionBackend> make_backend(
    const RunManifest& manifest, std::shared_ptr<const backend::FileSet> files,
    std::shared_ptr<backend::CompletionCache> cache);

struct DatasetRun {
  std::string dataset;
  std::optional<report::AuditReport> report;
  std::filesystem::path out_dir;
  std::vector<std::string> notes;
  // Set when no file of the dataset survived.
  std::optional<ErrorCode> failure;
};

struct RunHooks {
  // Called before a remote backend is used; returning false cancels the run.
  std::function<bool(const std::string& dataset, const CostEstimate&)> confirm_remote;
  // Overrides make_backend (tests inject fakes here).
  std::function<std::shared_ptr<backend::CompletionBackend>(
      const RunManifest&, std::shared_ptr<const backend::FileSet>,
      std::shared_ptr<backend::CompletionCache>)>
      backend_factory;
};

// Per dataset: parse, plan, prompt, complete, score, confound, verdict, and
// write <out>/<dataset>/{summary.json,trials.jsonl,report.html,plan.json,
// transcripts.jsonl,completions.jsonl}.
std::vector<DatasetRun> run_audit(const RunManifest& manifest, const RunHooks& hooks = {});

// 0 when every dataset produced a report, otherwise the code of the first
// failed dataset.
int exit_code(const std::vector<DatasetRun>& runs) noexcept;

struct BaselineRun {
  PreparedDataset dataset;
  confound::ConfoundProfile confound;
};

// Copy baselines and confound statistics only; no backend is touched.
BaselineRun run_baseline(const RunManifest& manifest, const DatasetSpec& spec);

}  // namespace tabaudit::cli
