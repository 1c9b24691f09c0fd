#include "tabaudit/http_backend.hpp"

#include <cmath>
#include <thread>

#include "canonical_json.hpp"
#include "httplib.h"
#include "tabaudit/error.hpp"

namespace tabaudit::backend {

using detail::Json;

std::chrono::milliseconds RetryPolicy::ceiling(int retry) const {
  const double scaled = static_cast<double>(base.count()) * std::pow(factor, retry - 1);
  return std::chrono::milliseconds(static_cast<std::int64_t>(scaled));
}

std::string chat_request_body(const prompt::PromptTranscript& transcript,
                              const GenParams& params) {
  Json messages = Json::array();
  for (const auto& m : transcript.messages) {
    messages.push_back({{"role", prompt::to_string(m.role)}, {"content", m.content}});
  }
  Json body = {
      {"model", params.model_id},
      {"messages", std::move(messages)},
      {"temperature", params.temperature},
      {"max_tokens", params.max_output_tokens},
  };
  return detail::canonical_dump(body, false);
}

CompletionResult parse_chat_response(std::string_view body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kServiceError, std::string("malformed response body: ") + e.what());
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw Error(ErrorCode::kServiceError, "response has no choices");
  }
  const auto& first = (*choices)[0];
  if (!first.contains("message") || !first["message"].is_object()) {
    throw Error(ErrorCode::kServiceError, "choices[0] has no message");
  }
  const auto& message = first["message"];
  CompletionResult r;
  const auto content = message.find("content");
  if (content != message.end() && content->is_string()) {
    r.text = content->get<std::string>();
  } else if (content == message.end() || !content->is_null()) {
    throw Error(ErrorCode::kServiceError, "choices[0].message.content is not a string");
  }
  if (const auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    TokenUsage u;
    u.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
    u.output_tokens = usage->value("completion_tokens", std::int64_t{0});
    r.token_usage = u;
  }
  return r;
}

Error status_error(int status, std::string_view body) {
  const std::string detail =
      "HTTP " + std::to_string(status) + ": " + std::string(body.substr(0, 200));
  if (status == 429) return Error(ErrorCode::kRateLimited, detail);
  if (status == 401 || status == 403) return Error(ErrorCode::kAuthError, detail);
  if (status >= 500) return Error(ErrorCode::kServiceError, detail);
  return Error(ErrorCode::kInvalidConfig, detail);
}

HttpChatBackend::HttpChatBackend(HttpChatOptions options)
    : options_(std::move(options)), rng_(options_.jitter_seed) {
  if (options_.base_url.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "http backend needs a base URL");
  }
  if (options_.retry.max_attempts < 1) {
    throw Error(ErrorCode::kInvalidConfig, "retry.max_attempts must be >= 1");
  }
  auto url = options_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  scheme_host_port_ = url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : url.substr(path_start);
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::chrono::milliseconds HttpChatBackend::jitter(int retry) {
  const auto ceiling = options_.retry.ceiling(retry).count();
  std::lock_guard lock(rng_mutex_);
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(rng_.below(static_cast<std::uint64_t>(ceiling) + 1)));
}

CompletionResult HttpChatBackend::attempt(const prompt::PromptTranscript& transcript,
                                          const GenParams& params) {
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(params.timeout);
  const auto secs = static_cast<time_t>(timeout.count() / 1'000'000);
  const auto usecs = static_cast<time_t>(timeout.count() % 1'000'000);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_prefix_ + "/chat/completions", headers,
                         chat_request_body(transcript, params), "application/json");
  if (!res) {
    throw Error(ErrorCode::kNetworkError,
                scheme_host_port_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) throw status_error(res->status, res->body);

  auto result = parse_chat_response(res->body);
  result.backend_id = id();
  result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  result.timestamp = utc_timestamp_now();
  return result;
}

CompletionResult HttpChatBackend::complete(const prompt::PromptTranscript& transcript,
                                           const GenParams& params) {
  for (int attempt_no = 1;; ++attempt_no) {
    try {
      return attempt(transcript, params);
    } catch (const Error& e) {
      if (!e.retryable() || attempt_no >= options_.retry.max_attempts) throw;
      options_.sleep(jitter(attempt_no));
    }
  }
}

}  // namespace tabaudit::backend
