#include "codegenlink/retrieval.hpp"

#include "codegenlink/errors.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_set>

namespace codegenlink {

std::string prompt_fixture_name(std::string_view prompt) { return text::sha256_hex(prompt).substr(0, 16); }

std::string build_link_prompt(std::string_view prior_response) {
    if (prior_response.empty()) throw Error(ErrorCode::EmptyInput, "prior response is empty");
    std::string prompt(prior_response);
    std::size_t trailing_newlines = 0;
    for (auto it = prompt.rbegin(); it != prompt.rend() && *it == '\n'; ++it) ++trailing_newlines;
    prompt.append(trailing_newlines >= 2 ? 0 : 2 - trailing_newlines, '\n');
    prompt.append(kLinkSearchSentence);
    return prompt;
}

namespace {

std::string_view language_phrase(Language lang) {
    switch (lang) {
        case Language::Python: return "Python code";
        case Language::Java: return "Java code";
        case Language::Unknown: return "code";
    }
    return "code";
}

std::string_view fence_tag(Language lang) {
    switch (lang) {
        case Language::Python: return "python";
        case Language::Java: return "java";
        case Language::Unknown: return "";
    }
    return "";
}

}  // namespace

std::string build_selection_prompt(const CodeSnippet& code) {
    if (code.content.empty()) throw Error(ErrorCode::EmptyInput, "selected code is empty");

    std::string sentence(kLinkSearchSentence);
    constexpr std::string_view kGenerated = "the generated code present in this response";
    sentence.replace(sentence.find(kGenerated), kGenerated.size(), "the following " + std::string(language_phrase(code.language)));

    // The fence must be longer than any backtick run inside the code.
    std::size_t longest_run = 0;
    std::size_t run = 0;
    for (char c : code.content) {
        run = (c == '`') ? run + 1 : 0;
        longest_run = std::max(longest_run, run);
    }
    const std::string fence(std::max<std::size_t>(3, longest_run + 1), '`');

    std::string prompt = sentence;
    prompt += "\n\n";
    prompt += fence;
    prompt += fence_tag(code.language);
    prompt += '\n';
    prompt += code.content;
    if (code.content.back() != '\n') prompt += '\n';
    prompt += fence;
    return prompt;
}

std::string build_prompt(const LinkQuery& query) {
    switch (query.mode) {
        case QueryMode::GeneratedResponse:
            if (!query.prior_response) {
                throw Error(ErrorCode::EmptyInput, "generated-response mode requires the prior response");
            }
            return build_link_prompt(*query.prior_response);
        case QueryMode::SelectedCode:
            return build_selection_prompt(query.code);
    }
    throw Error(ErrorCode::EmptyInput, "unknown query mode");
}

namespace {

bool ends_url(unsigned char c) {
    if (c <= 0x20 || c >= 0x7f) return true;
    switch (c) {
        case '<': case '>': case '"': case '\'': case '`': case '|':
        case '{': case '}': case '\\': case '^':
            return true;
        default:
            return false;
    }
}

// Trailing characters that are sentence or markup punctuation rather than URL.
// ')' is kept when it closes a '(' inside the URL itself.
void strip_trailing_punctuation(std::string_view& url) {
    while (!url.empty()) {
        const char last = url.back();
        if (last == ')') {
            const auto opens = std::count(url.begin(), url.end(), '(');
            const auto closes = std::count(url.begin(), url.end(), ')');
            if (closes <= opens) break;
            url.remove_suffix(1);
        } else if (last == '.' || last == ',' || last == ';' || last == ']' || last == '*' || last == '!' ||
                   last == '?' || last == ':') {
            url.remove_suffix(1);
        } else {
            break;
        }
    }
}

}  // namespace

std::vector<CandidateLink> parse_links_from_response(std::string_view raw_text, std::size_t max_links) {
    std::vector<CandidateLink> links;
    std::unordered_set<std::string> seen;
    std::size_t pos = 0;
    while (pos < raw_text.size() && links.size() < max_links) {
        std::size_t start = std::string_view::npos;
        std::size_t scheme_len = 0;
        for (std::size_t i = pos; i < raw_text.size(); ++i) {
            if (text::lower(raw_text[i]) != 'h') continue;
            if (i > 0 && text::is_alnum(static_cast<unsigned char>(raw_text[i - 1]))) continue;
            const std::string_view rest = raw_text.substr(i);
            if (text::starts_with_icase(rest, "https://")) {
                scheme_len = 8;
            } else if (text::starts_with_icase(rest, "http://")) {
                scheme_len = 7;
            } else {
                continue;
            }
            start = i;
            break;
        }
        if (start == std::string_view::npos) break;

        std::size_t end = start + scheme_len;
        while (end < raw_text.size() && !ends_url(static_cast<unsigned char>(raw_text[end]))) ++end;
        pos = end;

        std::string_view candidate = raw_text.substr(start, end - start);
        strip_trailing_punctuation(candidate);
        std::string url(candidate);
        if (seen.contains(url)) continue;
        try {
            links.push_back(make_link(url, links.size()));
            seen.insert(std::move(url));
        } catch (const Error&) {
            // Not a usable URL (e.g. bare "https://"); skip it.
        }
    }
    return links;
}

std::vector<CandidateLink> retrieve(const LinkQuery& query, LinkProvider& provider, std::size_t max_links) {
    const std::string prompt = build_prompt(query);
    const ProviderResponse response = provider.complete(prompt);
    return parse_links_from_response(response.raw_text, max_links);
}

// ---------------------------------------------------------------------------
// Providers

ReplayProvider::ReplayProvider(std::filesystem::path directory) : directory_(std::move(directory)) {}

ProviderResponse ReplayProvider::complete(const std::string& prompt) {
    const auto path = directory_ / prompt_fixture_name(prompt);
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::ProviderUnavailable, "no replay fixture " + path.string());
    }
    return ProviderResponse{text::read_file(path.string()), std::chrono::system_clock::time_point{}};
}

ChatCompletionProvider::ChatCompletionProvider(HttpClient& http, Options options)
    : http_(http), options_(std::move(options)) {}

ProviderResponse ChatCompletionProvider::complete(const std::string& prompt) {
    if (options_.api_key.empty()) throw Error(ErrorCode::ProviderUnavailable, "no API key configured (LLM_API_KEY)");

    const nlohmann::json payload = {
        {"model", options_.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
    };
    HttpRequest request;
    request.method = "POST";
    request.url = options_.endpoint;
    request.timeout = options_.timeout;
    request.body = payload.dump();
    request.headers = {
        {"Content-Type", "application/json"},
        {"Authorization", "Bearer " + options_.api_key},
    };

    HttpResponse response;
    try {
        response = http_.send(request);
    } catch (const Error& e) {
        throw Error(ErrorCode::ProviderUnavailable, e.what());
    }
    if (response.status != 200) {
        throw Error(ErrorCode::ProviderUnavailable,
                    "provider answered HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200));
    }

    std::string text;
    try {
        const auto doc = nlohmann::json::parse(response.body);
        const auto& message = doc.at("choices").at(0).at("message");
        if (message.contains("content") && message.at("content").is_string()) {
            text = message.at("content").get<std::string>();
        }
        if (message.contains("annotations") && message.at("annotations").is_array()) {
            for (const auto& annotation : message.at("annotations")) {
                if (annotation.contains("url_citation") && annotation.at("url_citation").contains("url")) {
                    text += "\n" + annotation.at("url_citation").at("url").get<std::string>();
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ProviderUnavailable, std::string("unexpected provider response: ") + e.what());
    }
    return ProviderResponse{std::move(text), std::chrono::system_clock::now()};
}

}  // namespace codegenlink
