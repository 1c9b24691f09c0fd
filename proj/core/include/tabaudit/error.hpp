#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tabaudit {

enum class ErrorCode {
  // ingest
  kNoConsistentDelimiter,
  kColumnCountMismatch,
  kEmptyAfterFiltering,
  kInvalidConfig,
  kIoError,
  // sampler
  kFileTooShort,
  kOverlapUnsatisfiable,
  // prompting
  kEmptyPrefix,
  // backends
  kNetworkError,
  kRateLimited,
  kServiceError,
  kAuthError,
  kCacheMiss,
  kPrefixNotFound,
  // scoring
  kEmptyCompletion,
  kNoTrials,
  // report
  kUnsupportedFormat,
  kParseError,
  kIntegrityMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library is an Error carrying a stable code;
// callers branch on code() rather than on the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  // RateLimited and ServiceError are the only transient failures.
  bool retryable() const noexcept {
    return code_ == ErrorCode::kRateLimited || code_ == ErrorCode::kServiceError;
  }

 private:
  ErrorCode code_;
};

class ColumnCountMismatch : public Error {
 public:
  ColumnCountMismatch(std::size_t line_no, std::size_t expected, std::size_t found);

  // 1-based physical line number in the raw text.
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

}  // namespace tabaudit
