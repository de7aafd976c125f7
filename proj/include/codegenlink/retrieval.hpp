#pragma once

#include "codegenlink/http.hpp"
#include "codegenlink/model.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codegenlink {

/// The link-search request appended after a generated response.
inline constexpr std::string_view kLinkSearchSentence =
    "Search the Web to find links where I can get more information about the generated code present in this "
    "response.";

enum class QueryMode {
    GeneratedResponse,  // code came from an assistant reply; the reply is resent
    SelectedCode,       // code selected by the user in an editor
};

struct LinkQuery {
    CodeSnippet code;
    QueryMode mode = QueryMode::SelectedCode;
    std::optional<std::string> prior_response;  // required for GeneratedResponse
};

struct ProviderResponse {
    std::string raw_text;
    std::chrono::system_clock::time_point fetched_at{};
};

/// Any backend that answers a prompt with free text expected to contain URLs.
/// Implementations must tolerate concurrent calls.
class LinkProvider {
public:
    virtual ~LinkProvider() = default;
    /// Throws Error(ProviderUnavailable) on network or authentication failure.
    virtual ProviderResponse complete(const std::string& prompt) = 0;
};

/// Serves canned responses from `<directory>/<prompt_fixture_name(prompt)>`.
class ReplayProvider final : public LinkProvider {
public:
    explicit ReplayProvider(std::filesystem::path directory);
    ProviderResponse complete(const std::string& prompt) override;

    [[nodiscard]] const std::filesystem::path& directory() const noexcept { return directory_; }

private:
    std::filesystem::path directory_;
};

/// Chat-completion endpoint with a web-search capable model (OpenAI-compatible
/// request/response shape). URL citations returned as annotations are appended
/// to the message text so they reach the link parser.
class ChatCompletionProvider final : public LinkProvider {
public:
    struct Options {
        std::string endpoint = "https://api.openai.com/v1/chat/completions";
        std::string model = "gpt-4o-search-preview";
        std::string api_key;
        std::chrono::seconds timeout{120};
    };

    ChatCompletionProvider(HttpClient& http, Options options);
    ProviderResponse complete(const std::string& prompt) override;

private:
    HttpClient& http_;
    Options options_;
};

/// Fixture filename for a prompt: the first 16 hex digits of its SHA-256.
std::string prompt_fixture_name(std::string_view prompt);

/// Mode 1: the prior assistant reply, one blank line, then the search request.
/// Throws EmptyInput.
std::string build_link_prompt(std::string_view prior_response);

/// Mode 2: the search request rephrased for pasted code, followed by the code
/// in a fenced block. Throws EmptyInput.
std::string build_selection_prompt(const CodeSnippet& code);

std::string build_prompt(const LinkQuery& query);

/// Every absolute http(s) URL in the text, in order of first appearance,
/// trailing punctuation stripped, deduplicated, at most `max_links`.
std::vector<CandidateLink> parse_links_from_response(std::string_view raw_text, std::size_t max_links);

std::vector<CandidateLink> retrieve(const LinkQuery& query, LinkProvider& provider, std::size_t max_links);

}  // namespace codegenlink
