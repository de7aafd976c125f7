#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace codegenlink {

enum class ErrorCode {
    MalformedUrl,
    EmptyInput,
    EmptyQuery,
    ZeroLengthQuery,
    ProviderUnavailable,
    NotABlobUrl,
    UnparseableHtml,
    FetchTimeout,
    FetchHttpError,
    TooManyRedirects,
    NetworkError,
    DuplicateRule,
    ApiUnavailable,
    RepoNotFound,
    MissingLabel,
    ConfigError,
    IoError,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library. The code carries the error kind,
/// `http_status` is only meaningful for FetchHttpError.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, int http_status = 0)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          http_status_(http_status) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    [[nodiscard]] int http_status() const noexcept { return http_status_; }

private:
    ErrorCode code_;
    int http_status_;
};

}  // namespace codegenlink
