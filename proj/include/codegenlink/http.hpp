#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace codegenlink {

inline constexpr std::string_view kUserAgent =
    "codegenlink/1.0 (code provenance checker)";

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::seconds timeout{15};
};

struct HttpResponse {
    int status = 0;
    /// Header names are stored lowercase.
    std::map<std::string, std::string> headers;
    std::string body;

    [[nodiscard]] std::optional<std::string> header(std::string_view name) const;
};

/// Transport abstraction. Implementations never follow redirects and throw
/// Error(FetchTimeout) or Error(NetworkError) on transport failure; any HTTP
/// status (including 4xx/5xx) is returned normally.
class HttpClient {
public:
    virtual ~HttpClient() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// libcurl-backed client.
class CurlHttpClient final : public HttpClient {
public:
    CurlHttpClient();
    HttpResponse send(const HttpRequest& request) override;
};

/// Offline client serving canned responses keyed by exact URL.
///
/// A fixture directory holds `index.json`, an object mapping each URL to
/// `{"status": int, "body": text | "body_file": relative path,
///   "headers": {name: value}, "error": "timeout" | "network"}`.
/// Unknown URLs answer 404 with an empty body.
class FixtureHttpClient final : public HttpClient {
public:
    FixtureHttpClient() = default;
    explicit FixtureHttpClient(const std::filesystem::path& directory);

    void add(std::string url, HttpResponse response);
    void add_error(std::string url, bool timeout);

    HttpResponse send(const HttpRequest& request) override;

    [[nodiscard]] std::vector<std::string> requested_urls() const;
    [[nodiscard]] std::size_t request_count(std::string_view url) const;

private:
    struct Entry {
        HttpResponse response;
        std::optional<bool> error_is_timeout;
    };
    mutable std::mutex mutex_;
    std::unordered_map<std::string, Entry> entries_;
    std::vector<std::string> log_;
};

class Clock {
public:
    using time_point = std::chrono::steady_clock::time_point;
    using duration = std::chrono::steady_clock::duration;

    virtual ~Clock() = default;
    [[nodiscard]] virtual time_point now() const = 0;
    virtual void sleep_until(time_point deadline) = 0;
};

class SystemClock final : public Clock {
public:
    [[nodiscard]] time_point now() const override { return std::chrono::steady_clock::now(); }
    void sleep_until(time_point deadline) override;
};

/// Clock whose sleeps advance virtual time instantly. Used for replay runs
/// and rate-limiter tests.
class VirtualClock final : public Clock {
public:
    [[nodiscard]] time_point now() const override;
    void sleep_until(time_point deadline) override;
    void advance(duration d);

private:
    mutable std::mutex mutex_;
    time_point now_{};
};

/// Per-host request spacing: consecutive requests to one host are granted
/// slots at least 1/rps apart. rps <= 0 disables limiting.
class RateLimiter {
public:
    RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock);

    /// Blocks (via the clock) until the host may be contacted; returns the granted slot.
    Clock::time_point acquire(std::string_view host);

    [[nodiscard]] Clock& clock() const noexcept { return *clock_; }

private:
    Clock::duration interval_{};
    std::shared_ptr<Clock> clock_;
    std::mutex mutex_;
    std::unordered_map<std::string, Clock::time_point> next_slot_;
};

}  // namespace codegenlink
