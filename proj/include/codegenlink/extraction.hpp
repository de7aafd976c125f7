#pragma once

#include "codegenlink/errors.hpp"
#include "codegenlink/http.hpp"
#include "codegenlink/model.hpp"

#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace codegenlink {

enum class ContentKind { Html, RawText };

struct PageCapture {
    std::string url;  // final URL after rewrite and redirects
    int status = 0;
    std::string body;
    ContentKind content_kind = ContentKind::Html;
};

/// github.com/{owner}/{repo}/blob/{ref}/{path} ->
/// raw.githubusercontent.com/{owner}/{repo}/{ref}/{path}.
/// Throws Error(NotABlobUrl) for any other GitHub URL.
std::string github_raw_url(std::string_view url);

/// Snippets shorter than this many non-whitespace characters are dropped.
inline constexpr std::size_t kMinSnippetChars = 10;

using ExtractionProcedure = std::function<std::vector<std::string>(std::string_view body)>;

struct ExtractionRule {
    DomainKind domain_kind = DomainKind::Other;
    ExtractionProcedure procedure;
};

/// Built-in rule bodies, exposed for reuse in custom rules.
namespace rules {
std::vector<std::string> stack_overflow(std::string_view html);
std::vector<std::string> github_raw(std::string_view body);
std::vector<std::string> geeks_for_geeks(std::string_view html);
std::vector<std::string> generic(std::string_view html);
}  // namespace rules

/// One extraction rule per domain kind. A fresh registry carries the
/// built-in rules; each kind may be overridden once by register_rule, a
/// second registration for the same kind throws Error(DuplicateRule).
class RuleRegistry {
public:
    RuleRegistry();

    void register_rule(ExtractionRule rule);
    [[nodiscard]] const ExtractionRule& rule_for(DomainKind kind) const;
    [[nodiscard]] bool is_builtin(DomainKind kind) const;

private:
    struct Slot {
        ExtractionRule rule;
        bool builtin = true;
    };
    std::map<DomainKind, Slot> slots_;
};

struct ExtractionResult {
    std::vector<CodeSnippet> snippets;
    bool unparseable = false;  // body could not be parsed; snippets is empty
};

/// Applies the rule for `kind` to a 200 capture. Every snippet inherits
/// `language` (the query's) and carries the capture URL as its source.
ExtractionResult extract_snippets(const PageCapture& capture, DomainKind kind, Language language,
                                  const RuleRegistry& registry);

struct FetchOptions {
    std::chrono::seconds timeout{15};
    double rate_limit_rps = 1.0;
    int max_redirects = 5;
};

/// GET with manual redirect following, per-host rate limiting and an in-run
/// cache: each URL (requested or final) is fetched at most once. Thread-safe.
class Fetcher {
public:
    Fetcher(HttpClient& http, FetchOptions options, std::shared_ptr<Clock> clock);

    /// Throws Error(FetchTimeout | FetchHttpError | TooManyRedirects |
    /// NetworkError | MalformedUrl). Failures are cached too.
    PageCapture fetch(const std::string& url);

    [[nodiscard]] RateLimiter& rate_limiter() noexcept { return limiter_; }
    [[nodiscard]] HttpClient& http() noexcept { return http_; }
    [[nodiscard]] const FetchOptions& options() const noexcept { return options_; }

private:
    using Outcome = std::variant<PageCapture, Error>;

    Outcome fetch_uncached(const std::string& url);

    HttpClient& http_;
    FetchOptions options_;
    RateLimiter limiter_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::shared_future<Outcome>> cache_;
};

}  // namespace codegenlink
