#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>

#include "tabaudit/backend.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit::backend {

// Exponential backoff with full jitter: before retry k (1-based) the client
// sleeps a uniform duration in [0, base * factor^(k-1)].
struct RetryPolicy {
  std::chrono::milliseconds base{1000};
  double factor = 2.0;
  int max_attempts = 5;

  std::chrono::milliseconds ceiling(int retry) const;
};

struct HttpChatOptions {
  // e.g. "https://api.openai.com/v1"; requests go to {base_url}/chat/completions.
  std::string base_url;
  std::string api_key;
  RetryPolicy retry;
  std::uint64_t jitter_seed = 0;
  // Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

inline constexpr const char* kApiKeyEnv = "TABAUDIT_API_KEY";
inline constexpr const char* kBaseUrlEnv = "TABAUDIT_BASE_URL";

// Request body for the OpenAI-compatible chat-completions endpoint.
std::string chat_request_body(const prompt::PromptTranscript& transcript,
                              const GenParams& params);

// Parses choices[0].message.content and the optional usage block.
CompletionResult parse_chat_response(std::string_view body);

// Maps a non-2xx status to the error taxonomy (429 RateLimited, 401/403
// AuthError, 5xx ServiceError, other 4xx InvalidConfig).
Error status_error(int status, std::string_view body);

class HttpChatBackend : public CompletionBackend {
 public:
  explicit HttpChatBackend(HttpChatOptions options);

  CompletionResult complete(const prompt::PromptTranscript& transcript,
                            const GenParams& params) override;
  std::string id() const override { return "http_chat"; }
  bool is_remote() const override { return true; }

  // Single request, no retries.
  CompletionResult attempt(const prompt::PromptTranscript& transcript, const GenParams& params);

 private:
  std::chrono::milliseconds jitter(int retry);

  HttpChatOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::mutex rng_mutex_;
  SplitMix64 rng_;
};

}  // namespace tabaudit::backend
