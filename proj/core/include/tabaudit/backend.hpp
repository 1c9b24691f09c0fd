#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabaudit/dataset.hpp"
#include "tabaudit/prompt.hpp"

namespace tabaudit::backend {

struct GenParams {
  std::string model_id = "gpt-4";
  double temperature = 0.0;
  std::int64_t max_output_tokens = 256;
  std::chrono::milliseconds timeout{60'000};

  void validate() const;

  bool operator==(const GenParams&) const = default;
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t output_tokens = 0;

  bool operator==(const TokenUsage&) const = default;
};

struct CompletionResult {
  std::string text;
  std::string backend_id;
  bool cached = false;
  std::chrono::milliseconds latency{0};
  std::optional<TokenUsage> token_usage;
  // UTC ISO-8601 time the completion was produced. Replay returns the
  // recorded value, so reports built from a cache are reproducible.
  std::string timestamp;
};

// Implementations must be safe to call concurrently.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  virtual CompletionResult complete(const prompt::PromptTranscript& transcript,
                                    const GenParams& params) = 0;
  virtual std::string id() const = 0;
  // Remote backends cost money; the CLI asks for confirmation before using them.
  virtual bool is_remote() const { return false; }
};

// SHA-256 over a length-prefixed encoding of the ordered (role, content)
// pairs, model_id, temperature and max_output_tokens.
std::string cache_key(const prompt::PromptTranscript& transcript, const GenParams& params);

// SHA-256 over the messages only.
std::string transcript_digest(const prompt::PromptTranscript& transcript);

std::string utc_timestamp_now();

// Lookup of files by source name, shared by the synthetic backends.
class FileSet {
 public:
  FileSet() = default;
  explicit FileSet(std::vector<std::shared_ptr<const ingest::DatasetFile>> files);

  // Row that follows the first occurrence of `prefix` as a contiguous block,
  // searching the file named `file_ref` (or every file when it is empty or
  // unknown). Throws PrefixNotFound.
  const std::string& next_row(std::string_view file_ref,
                              const std::vector<std::string>& prefix) const;

  const ingest::DatasetFile* find(std::string_view file_ref) const;

 private:
  struct Indexed {
    std::shared_ptr<const ingest::DatasetFile> file;
    std::unordered_map<std::string_view, std::vector<std::size_t>> first_row_index;
  };
  const std::string* lookup(const Indexed& entry, const std::vector<std::string>& prefix) const;

  std::vector<Indexed> files_;
};

// Returns the true next row of the file for the test prefix.
class MemorizerBackend : public CompletionBackend {
 public:
  explicit MemorizerBackend(std::shared_ptr<const FileSet> files);
  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return "memorizer"; }

 protected:
  std::string memorized_row(const prompt::PromptTranscript& transcript) const;

 private:
  std::shared_ptr<const FileSet> files_;
};

// Returns the last prefix row unchanged.
class CopyLastBackend : public CompletionBackend {
 public:
  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return "copy_last"; }
};

// Returns the last prefix row with every decimal digit redrawn uniformly, so
// the cell count and numeral layout match while the values are noise.
class RandomBackend : public CompletionBackend {
 public:
  explicit RandomBackend(std::uint64_t seed) : seed_(seed) {}
  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return "random"; }

 private:
  std::uint64_t seed_;
};

// Memorizer output with each character independently replaced, with
// probability p, by a different character.
class NoisyMemorizerBackend : public MemorizerBackend {
 public:
  NoisyMemorizerBackend(std::shared_ptr<const FileSet> files, double p, std::uint64_t seed);
  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return "noisy_memorizer"; }

 private:
  double p_;
  std::uint64_t seed_;
};

// Per-trial generator seed: independent of call order, so concurrent
// completion does not change synthetic output.
std::uint64_t trial_seed(std::uint64_t seed, const prompt::PromptTranscript& transcript);

}  // namespace tabaudit::backend
