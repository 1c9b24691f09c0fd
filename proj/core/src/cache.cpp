#include "tabaudit/cache.hpp"

#include <fstream>

#include "canonical_json.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/text.hpp"

namespace tabaudit::backend {

using detail::Json;

std::string cache_record_to_jsonl(const CacheRecord& r) {
  Json j = {
      {"key", r.key},
      {"transcript_digest", r.transcript_digest},
      {"model_id", r.model_id},
      {"text", r.text},
      {"timestamp", r.timestamp},
      {"backend_id", r.backend_id},
  };
  if (r.token_usage) {
    j["token_usage"] = {{"prompt_tokens", r.token_usage->prompt_tokens},
                        {"output_tokens", r.token_usage->output_tokens}};
  } else {
    j["token_usage"] = nullptr;
  }
  return detail::canonical_dump(j, false);
}

CacheRecord cache_record_from_json(std::string_view line) {
  const Json j = detail::parse_json(line);
  CacheRecord r;
  r.key = detail::get_string(j, "key");
  r.transcript_digest = detail::get_string(j, "transcript_digest");
  r.model_id = detail::get_string(j, "model_id");
  r.text = detail::get_string(j, "text");
  r.timestamp = detail::get_string(j, "timestamp");
  if (j.contains("backend_id")) r.backend_id = detail::get_string(j, "backend_id");
  if (j.contains("token_usage") && !j["token_usage"].is_null()) {
    const auto& u = j["token_usage"];
    r.token_usage = TokenUsage{detail::get_int(u, "prompt_tokens"),
                               detail::get_int(u, "output_tokens")};
  }
  return r;
}

CompletionCache::CompletionCache(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(*path_)) return;
  const auto content = text::read_file_lossy(*path_);
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::is_blank(line)) continue;
    try {
      auto record = cache_record_from_json(line);
      records_[record.key] = std::move(record);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError,
                  path_->string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::optional<CacheRecord> CompletionCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  const auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void CompletionCache::append(CacheRecord record) {
  std::lock_guard lock(mutex_);
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path_->string());
    out << cache_record_to_jsonl(record) << '\n';
    out.flush();
  }
  records_[record.key] = std::move(record);
}

std::size_t CompletionCache::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

CompletionResult result_from_record(const CacheRecord& record) {
  CompletionResult r;
  r.text = record.text;
  r.backend_id = record.backend_id.empty() ? "replay" : record.backend_id;
  r.cached = true;
  r.token_usage = record.token_usage;
  r.timestamp = record.timestamp;
  return r;
}

ReplayBackend::ReplayBackend(std::shared_ptr<const CompletionCache> cache)
    : cache_(std::move(cache)) {}

CompletionResult ReplayBackend::complete(const prompt::PromptTranscript& transcript,
                                         const GenParams& params) {
  const auto key = cache_key(transcript, params);
  const auto record = cache_->lookup(key);
  if (!record) {
    throw Error(ErrorCode::kCacheMiss, "no cached completion for trial " +
                                           std::to_string(transcript.trial_id) + " of " +
                                           transcript.file_ref + " (key " + key + ")");
  }
  return result_from_record(*record);
}

RecordingBackend::RecordingBackend(std::shared_ptr<CompletionBackend> inner,
                                   std::shared_ptr<CompletionCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {}

CompletionResult RecordingBackend::complete(const prompt::PromptTranscript& transcript,
                                            const GenParams& params) {
  const auto key = cache_key(transcript, params);
  if (const auto hit = cache_->lookup(key)) return result_from_record(*hit);

  auto result = inner_->complete(transcript, params);
  CacheRecord record;
  record.key = key;
  record.transcript_digest = transcript_digest(transcript);
  record.model_id = params.model_id;
  record.text = result.text;
  record.timestamp = result.timestamp;
  record.token_usage = result.token_usage;
  record.backend_id = result.backend_id;
  cache_->append(std::move(record));
  return result;
}

}  // namespace tabaudit::backend
