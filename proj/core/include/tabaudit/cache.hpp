#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "tabaudit/backend.hpp"

namespace tabaudit::backend {

// One line of the append-only JSON-lines cache file.
struct CacheRecord {
  std::string key;
  std::string transcript_digest;
  std::string model_id;
  std::string text;
  std::string timestamp;
  std::optional<TokenUsage> token_usage;
  std::string backend_id;

  bool operator==(const CacheRecord&) const = default;
};

std::string cache_record_to_jsonl(const CacheRecord& record);
CacheRecord cache_record_from_json(std::string_view line);

// Completion cache backed by a JSON-lines file. Existing records are loaded on
// construction; append() writes through under a mutex. For duplicate keys the
// last record wins.
class CompletionCache {
 public:
  // In-memory only (nothing persisted).
  CompletionCache() = default;
  explicit CompletionCache(std::filesystem::path path);

  std::optional<CacheRecord> lookup(const std::string& key) const;
  void append(CacheRecord record);
  std::size_t size() const;
  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, CacheRecord> records_;
};

// Serves completions from the cache only; never touches the network.
class ReplayBackend : public CompletionBackend {
 public:
  explicit ReplayBackend(std::shared_ptr<const CompletionCache> cache);
  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return "replay"; }

 private:
  std::shared_ptr<const CompletionCache> cache_;
};

// Read-through recorder: cache hits are served from the cache, misses go to
// the wrapped backend and are appended.
class RecordingBackend : public CompletionBackend {
 public:
  RecordingBackend(std::shared_ptr<CompletionBackend> inner,
                   std::shared_ptr<CompletionCache> cache);
  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return inner_->id(); }
  bool is_remote() const override { return inner_->is_remote(); }

 private:
  std::shared_ptr<CompletionBackend> inner_;
  std::shared_ptr<CompletionCache> cache_;
};

CompletionResult result_from_record(const CacheRecord& record);

}  // namespace tabaudit::backend
