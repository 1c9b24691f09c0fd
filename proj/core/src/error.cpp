#include "tabaudit/error.hpp"

namespace tabaudit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNoConsistentDelimiter: return "NoConsistentDelimiter";
    case ErrorCode::kColumnCountMismatch: return "ColumnCountMismatch";
    case ErrorCode::kEmptyAfterFiltering: return "EmptyAfterFiltering";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFileTooShort: return "FileTooShort";
    case ErrorCode::kOverlapUnsatisfiable: return "OverlapUnsatisfiable";
    case ErrorCode::kEmptyPrefix: return "EmptyPrefix";
    case ErrorCode::kNetworkError: return "NetworkError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kServiceError: return "ServiceError";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kCacheMiss: return "CacheMiss";
    case ErrorCode::kPrefixNotFound: return "PrefixNotFound";
    case ErrorCode::kEmptyCompletion: return "EmptyCompletion";
    case ErrorCode::kNoTrials: return "NoTrials";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIntegrityMismatch: return "IntegrityMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ColumnCountMismatch::ColumnCountMismatch(std::size_t line_no, std::size_t expected,
                                         std::size_t found)
    : Error(ErrorCode::kColumnCountMismatch,
            "line " + std::to_string(line_no) + " has " + std::to_string(found) +
                " columns, expected " + std::to_string(expected)),
      line_no_(line_no) {}

}  // namespace tabaudit
