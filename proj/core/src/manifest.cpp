#include "tabaudit/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "CLI11.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::cli {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

std::string key_name(const CLI::ConfigItem& item) {
  std::string out;
  for (const auto& p : item.parents) out += p + ".";
  return out + item.name;
}

const std::string& single(const CLI::ConfigItem& item) {
  if (item.inputs.size() != 1) bad(key_name(item) + " expects one value");
  return item.inputs.front();
}

bool as_bool(const CLI::ConfigItem& item) {
  const auto& v = single(item);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad(key_name(item) + " expects true or false");
}

double as_double(const CLI::ConfigItem& item) {
  const auto v = text::parse_number(single(item));
  if (!v) bad(key_name(item) + " expects a number");
  return *v;
}

std::uint64_t as_uint(const CLI::ConfigItem& item) {
  const auto& s = single(item);
  std::uint64_t out = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad(key_name(item) + " expects a non-negative integer");
  return out;
}

char as_delimiter(const CLI::ConfigItem& item) {
  const auto& s = single(item);
  if (s == "\\t" || s == "tab") return '\t';
  if (s == "space") return ' ';
  if (s.size() != 1 || !ingest::is_supported_delimiter(s[0])) {
    bad(key_name(item) + " must be one of , ; tab space");
  }
  return s[0];
}

void apply_parse_key(ingest::ParseConfig& cfg, const CLI::ConfigItem& item) {
  if (item.name == "delimiter") {
    cfg.delimiter = as_delimiter(item);
  } else if (item.name == "has_header") {
    cfg.has_header = as_bool(item);
  } else if (item.name == "comment_prefix") {
    cfg.comment_prefix = single(item);
  } else if (item.name == "columns") {
    cfg.expected_column_count = as_uint(item);
  } else {
    bad("unknown key " + key_name(item));
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (base.empty() || path.is_absolute()) return path;
  return base / path;
}

}  // namespace

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::kHttp: return "http";
    case BackendKind::kReplay: return "replay";
    case BackendKind::kMemorizer: return "memorizer";
    case BackendKind::kCopy: return "copy";
    case BackendKind::kRandom: return "random";
    case BackendKind::kNoisy: return "noisy";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view name) {
  for (auto k : {BackendKind::kHttp, BackendKind::kReplay, BackendKind::kMemorizer,
                 BackendKind::kCopy, BackendKind::kRandom, BackendKind::kNoisy}) {
    if (to_string(k) == name) return k;
  }
  bad("unknown backend '" + std::string(name) + "'");
}

void RunManifest::validate() const {
  if (datasets.empty()) bad("manifest names no datasets");
  for (const auto& d : datasets) {
    if (d.name.empty()) bad("dataset with empty name");
    if (d.patterns.empty()) bad("dataset '" + d.name + "' has no paths");
  }
  for (const auto& [name, cfg] : parse_overrides) {
    const bool known = std::any_of(datasets.begin(), datasets.end(),
                                   [&](const DatasetSpec& d) { return d.name == name; });
    if (!known) bad("parse override for unknown dataset '" + name + "'");
    cfg.validate();
  }
  if (parse) parse->validate();
  audit.validate();
  generation.validate();
  thresholds.validate();
  if (concurrency == 0) bad("concurrency must be at least 1");
  if (!(noise_p >= 0.0 && noise_p <= 1.0)) bad("noise_p must lie in [0, 1]");
  if (backend == BackendKind::kReplay && !cache) bad("replay backend needs a cache file");
}

std::optional<ingest::ParseConfig> RunManifest::parse_config_for(
    const std::string& dataset) const {
  if (auto it = parse_overrides.find(dataset); it != parse_overrides.end()) return it->second;
  return parse;
}

RunManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<CLI::ConfigItem> items;
  try {
    std::istringstream in{std::string(text)};
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    bad(std::string("manifest: ") + e.what());
  }

  RunManifest m;
  for (const auto& item : items) {
    // CLI11 emits section open/close markers as "++" / "--" entries.
    if (item.name == "++" || item.name == "--") continue;
    const auto& parents = item.parents;
    const auto key = key_name(item);
    if (parents.empty()) {
      const auto& n = item.name;
      if (n == "out") m.out_dir = resolve(base_dir, single(item));
      else if (n == "seed") m.audit.seed = as_uint(item);
      else if (n == "trials") m.audit.n_trials = as_uint(item);
      else if (n == "window") m.audit.window_len = as_uint(item);
      else if (n == "fewshot") m.audit.n_fewshot = as_uint(item);
      else if (n == "allow_overlap") m.audit.allow_overlap = as_bool(item);
      else if (n == "backend") m.backend = parse_backend_kind(single(item));
      else if (n == "model") m.generation.model_id = single(item);
      else if (n == "temperature") m.generation.temperature = as_double(item);
      else if (n == "max_tokens") m.generation.max_output_tokens = static_cast<std::int64_t>(as_uint(item));
      else if (n == "timeout_ms") m.generation.timeout = std::chrono::milliseconds(as_uint(item));
      else if (n == "noise_p") m.noise_p = as_double(item);
      else if (n == "base_url") m.base_url = single(item);
      else if (n == "cache") m.cache = resolve(base_dir, single(item));
      else if (n == "concurrency") m.concurrency = as_uint(item);
      else if (n == "granularity") m.granularity = report::parse_granularity(single(item));
      else if (n == "role_map") m.role_map = prompt::parse_role_map(single(item));
      else if (n == "include_header") m.include_header = as_bool(item);
      else if (n == "strip_fences") m.extract.strip_fences = as_bool(item);
      else if (n == "trim_whitespace") m.extract.trim_whitespace = as_bool(item);
      else bad("unknown key " + key);
    } else if (parents.size() == 1 && parents[0] == "datasets") {
      DatasetSpec spec{item.name, {}};
      for (const auto& p : item.inputs) spec.patterns.push_back(resolve(base_dir, p).string());
      m.datasets.push_back(std::move(spec));
    } else if (parents.size() == 1 && parents[0] == "parse") {
      if (!m.parse) m.parse = ingest::ParseConfig{};
      apply_parse_key(*m.parse, item);
    } else if (parents.size() == 2 && parents[0] == "parse") {
      auto [it, inserted] = m.parse_overrides.try_emplace(parents[1]);
      apply_parse_key(it->second, item);
    } else if (parents.size() == 1 && parents[0] == "thresholds") {
      auto& t = m.thresholds;
      const auto& n = item.name;
      if (n == "margin_min") t.margin_min = as_double(item);
      else if (n == "confound_dup") t.confound_dup = as_double(item);
      else if (n == "min_run") t.min_run = as_uint(item);
      else if (n == "label_max_cardinality") t.label_max_cardinality = as_uint(item);
      else if (n == "label_min_run") t.label_min_run = as_uint(item);
      else bad("unknown key " + key);
    } else {
      bad("unknown key " + key);
    }
  }
  return m;
}

RunManifest load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) bad("manifest " + path.string() + " does not exist");
  return parse_manifest(text::read_file_lossy(path), path.parent_path());
}

}  // namespace tabaudit::cli
