#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/backend.hpp"
#include "tabaudit/confound.hpp"
#include "tabaudit/dataset.hpp"
#include "tabaudit/prompt.hpp"
#include "tabaudit/report.hpp"
#include "tabaudit/sampler.hpp"
#include "tabaudit/scoring.hpp"

namespace tabaudit::cli {

enum class BackendKind { kHttp, kReplay, kMemorizer, kCopy, kRandom, kNoisy };

std::string_view to_string(BackendKind kind) noexcept;
BackendKind parse_backend_kind(std::string_view name);  // throws InvalidConfig

struct DatasetSpec {
  std::string name;
  // Paths or glob patterns.
  std::vector<std::string> patterns;

  bool operator==(const DatasetSpec&) const = default;
};

struct RunManifest {
  std::vector<DatasetSpec> datasets;
  // Applied to every file; inferred from the file when unset.
  std::optional<ingest::ParseConfig> parse;
  // Per-dataset overrides, keyed by dataset name.
  std::map<std::string, ingest::ParseConfig> parse_overrides;

  sampling::AuditConfig audit;
  backend::GenParams generation;
  std::optional<BackendKind> backend;
  double noise_p = 0.1;
  std::string base_url = "https://api.openai.com/v1";
  std::optional<std::filesystem::path> cache;
  std::size_t concurrency = 4;

  std::filesystem::path out_dir = "tabaudit-out";
  confound::Thresholds thresholds;
  report::Granularity granularity = report::Granularity::kCell;
  prompt::RoleMap role_map = prompt::RoleMap::kUserAssistant;
  scoring::ExtractOptions extract;
  bool include_header = false;

  // At least one dataset with at least one pattern, valid sub-configs.
  // Throws InvalidConfig.
  void validate() const;
  std::optional<ingest::ParseConfig> parse_config_for(const std::string& dataset) const;
};

// TOML-style key/value text. Top-level keys:
//   out, seed, trials, window, fewshot, allow_overlap, backend, model,
//   temperature, max_tokens, timeout_ms, noise_p, base_url, cache,
//   concurrency, granularity, role_map, include_header, strip_fences,
//   trim_whitespace
// Sections: [datasets] name = "glob" | ["glob", ...]; [parse] and
// [parse.<dataset>] with delimiter, has_header, comment_prefix, columns;
// [thresholds] margin_min, confound_dup, min_run, label_max_cardinality,
// label_min_run. Relative dataset and cache paths resolve against base_dir.
RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {});
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace tabaudit::cli
