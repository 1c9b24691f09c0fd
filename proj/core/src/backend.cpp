#include "tabaudit/backend.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "tabaudit/digest.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/rng.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::backend {
namespace {

void put_field(std::string& out, std::string_view name, std::string_view value) {
  out.append(name);
  out.push_back('\n');
  out.append(std::to_string(value.size()));
  out.push_back('\n');
  out.append(value);
  out.push_back('\n');
}

std::string encode_messages(const prompt::PromptTranscript& transcript) {
  std::string out;
  for (const auto& m : transcript.messages) {
    put_field(out, "role", prompt::to_string(m.role));
    put_field(out, "content", m.content);
  }
  return out;
}

CompletionResult synthetic_result(std::string text, std::string backend_id) {
  CompletionResult r;
  r.text = std::move(text);
  r.backend_id = std::move(backend_id);
  r.timestamp = utc_timestamp_now();
  return r;
}

}  // namespace

void GenParams::validate() const {
  if (!(temperature >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "temperature must be >= 0");
  if (max_output_tokens < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_output_tokens must be >= 1");
  }
  if (model_id.empty()) throw Error(ErrorCode::kInvalidConfig, "model_id must be set");
}

std::string transcript_digest(const prompt::PromptTranscript& transcript) {
  return sha256_hex("tabaudit-transcript/v1\n" + encode_messages(transcript));
}

std::string cache_key(const prompt::PromptTranscript& transcript, const GenParams& params) {
  std::string payload = "tabaudit-cache-key/v1\n" + encode_messages(transcript);
  put_field(payload, "model_id", params.model_id);
  put_field(payload, "temperature", text::format_double(params.temperature));
  put_field(payload, "max_output_tokens", std::to_string(params.max_output_tokens));
  return sha256_hex(payload);
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() %
      1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof(out), "%.*s.%03dZ", static_cast<int>(n), buf,
                static_cast<int>(millis));
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, const prompt::PromptTranscript& transcript) {
  return mix_seed(mix_seed(seed, fnv1a64(transcript.file_ref)), transcript.trial_id);
}

// ---------------------------------------------------------------------------

FileSet::FileSet(std::vector<std::shared_ptr<const ingest::DatasetFile>> files) {
  files_.reserve(files.size());
  for (auto& f : files) {
    Indexed entry;
    entry.file = std::move(f);
    for (std::size_t i = 0; i < entry.file->rows.size(); ++i) {
      entry.first_row_index[entry.file->rows[i]].push_back(i);
    }
    files_.push_back(std::move(entry));
  }
}

const ingest::DatasetFile* FileSet::find(std::string_view file_ref) const {
  for (const auto& e : files_) {
    if (e.file->source_name == file_ref) return e.file.get();
  }
  return nullptr;
}

const std::string* FileSet::lookup(const Indexed& entry,
                                   const std::vector<std::string>& prefix) const {
  const auto& rows = entry.file->rows;
  const auto it = entry.first_row_index.find(prefix.front());
  if (it == entry.first_row_index.end()) return nullptr;
  for (std::size_t start : it->second) {
    if (start + prefix.size() >= rows.size()) break;
    bool match = true;
    for (std::size_t k = 1; k < prefix.size() && match; ++k) {
      match = rows[start + k] == prefix[k];
    }
    if (match) return &rows[start + prefix.size()];
  }
  return nullptr;
}

const std::string& FileSet::next_row(std::string_view file_ref,
                                     const std::vector<std::string>& prefix) const {
  if (prefix.empty()) throw Error(ErrorCode::kEmptyPrefix, "empty prefix block");
  for (const auto& e : files_) {
    if (e.file->source_name != file_ref) continue;
    if (const auto* row = lookup(e, prefix)) return *row;
    throw Error(ErrorCode::kPrefixNotFound,
                "prefix block does not occur in " + std::string(file_ref));
  }
  for (const auto& e : files_) {
    if (const auto* row = lookup(e, prefix)) return *row;
  }
  throw Error(ErrorCode::kPrefixNotFound, "prefix block does not occur in any loaded file");
}

// ---------------------------------------------------------------------------

MemorizerBackend::MemorizerBackend(std::shared_ptr<const FileSet> files)
    : files_(std::move(files)) {}

std::string MemorizerBackend::memorized_row(const prompt::PromptTranscript& transcript) const {
  std::optional<std::string> header;
  if (const auto* f = files_->find(transcript.file_ref)) header = f->header_line;
  return files_->next_row(transcript.file_ref, prompt::test_prefix_rows(transcript, header));
}

CompletionResult MemorizerBackend::complete(const prompt::PromptTranscript& transcript,
                                            const GenParams&) {
  return synthetic_result(memorized_row(transcript), id());
}

CompletionResult CopyLastBackend::complete(const prompt::PromptTranscript& transcript,
                                           const GenParams&) {
  return synthetic_result(prompt::test_prefix_rows(transcript).back(), id());
}

CompletionResult RandomBackend::complete(const prompt::PromptTranscript& transcript,
                                         const GenParams&) {
  std::string row = prompt::test_prefix_rows(transcript).back();
  SplitMix64 rng(trial_seed(seed_, transcript));
  for (char& c : row) {
    if (c >= '0' && c <= '9') c = static_cast<char>('0' + rng.below(10));
  }
  return synthetic_result(std::move(row), id());
}

NoisyMemorizerBackend::NoisyMemorizerBackend(std::shared_ptr<const FileSet> files, double p,
                                             std::uint64_t seed)
    : MemorizerBackend(std::move(files)), p_(p), seed_(seed) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "noise probability must lie in [0, 1]");
  }
}

CompletionResult NoisyMemorizerBackend::complete(const prompt::PromptTranscript& transcript,
                                                 const GenParams&) {
  auto scalars = text::to_scalars(memorized_row(transcript));
  SplitMix64 rng(trial_seed(seed_, transcript));
  for (char32_t& c : scalars) {
    // Always draw the coin so the stream position does not depend on p.
    const bool flip = rng.unit() < p_;
    const auto pick = rng.below(9);
    if (!flip) continue;
    if (c >= U'0' && c <= U'9') {
      const auto offset = static_cast<char32_t>(pick + 1);  // 1..9, never 0
      c = U'0' + (c - U'0' + offset) % 10;
    } else {
      c = U'0' + static_cast<char32_t>(pick);
    }
  }
  return synthetic_result(text::from_scalars(scalars), id());
}

}  // namespace tabaudit::backend
