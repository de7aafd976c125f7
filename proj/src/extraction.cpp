#include "codegenlink/extraction.hpp"

#include "codegenlink/errors.hpp"
#include "codegenlink/html.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <unordered_set>

namespace codegenlink {

std::string github_raw_url(std::string_view url) {
    const ParsedUrl parsed = parse_url(url);
    if (parsed.host != "github.com" && parsed.host != "www.github.com") {
        throw Error(ErrorCode::NotABlobUrl, "not a github.com URL: " + std::string(url));
    }
    // /{owner}/{repo}/blob/{ref}/{path...}
    std::vector<std::string_view> parts;
    for (std::string_view part : text::split(std::string_view(parsed.path).substr(1), '/')) parts.push_back(part);
    if (parts.size() < 5 || parts[2] != "blob" || parts[0].empty() || parts[1].empty() || parts[3].empty() ||
        parts.back().empty()) {
        throw Error(ErrorCode::NotABlobUrl, std::string(url));
    }
    std::string raw = "https://raw.githubusercontent.com/";
    raw += parts[0];
    raw += '/';
    raw += parts[1];
    for (std::size_t i = 3; i < parts.size(); ++i) {
        raw += '/';
        raw += parts[i];
    }
    return raw;
}

// ---------------------------------------------------------------------------
// Built-in rules

namespace rules {

std::vector<std::string> stack_overflow(std::string_view body) {
    const auto doc = html::Document::parse(body);
    std::vector<std::string> out;
    for (std::size_t id : doc.elements_by_tag("code")) {
        if (doc.has_ancestor(id, "pre") && !doc.has_ancestor(id, "code")) out.push_back(doc.text_content(id));
    }
    return out;
}

std::vector<std::string> github_raw(std::string_view body) { return {std::string(body)}; }

namespace {

bool class_mentions_code(const html::Document& doc, std::size_t id) {
    const auto cls = doc.attribute(id, "class");
    return cls && text::to_lower(*cls).find("code") != std::string::npos;
}

// Keeps only elements with no selected ancestor (ids are in document order).
std::vector<std::size_t> outermost(const html::Document& doc, const std::vector<std::size_t>& ids) {
    std::unordered_set<std::size_t> selected;
    std::vector<std::size_t> out;
    for (std::size_t id : ids) {
        bool nested = false;
        for (std::size_t p = doc.node(id).parent; p != html::Document::kRoot; p = doc.node(p).parent) {
            if (selected.contains(p)) {
                nested = true;
                break;
            }
        }
        if (!nested) {
            selected.insert(id);
            out.push_back(id);
        }
    }
    return out;
}

std::size_t content_lines(std::string_view text) {
    std::size_t lines = 0;
    for (std::string_view line : text::split_lines(text)) {
        if (text::count_non_space(line) > 0) ++lines;
    }
    return lines;
}

}  // namespace

std::vector<std::string> geeks_for_geeks(std::string_view body) {
    const auto doc = html::Document::parse(body);
    const auto candidates = doc.find_all(
        [&](std::size_t id, const html::Node& n) { return n.tag == "pre" || class_mentions_code(doc, id); });
    std::vector<std::string> out;
    for (std::size_t id : outermost(doc, candidates)) out.push_back(doc.text_content(id));
    return out;
}

std::vector<std::string> generic(std::string_view body) {
    const auto doc = html::Document::parse(body);
    const auto candidates = doc.find_all([&](std::size_t id, const html::Node& n) {
        if (n.tag == "pre") return true;
        return n.tag == "code" && !doc.has_ancestor(id, "pre");
    });
    std::vector<std::string> out;
    for (std::size_t id : outermost(doc, candidates)) {
        std::string text = doc.text_content(id);
        if (doc.node(id).tag == "code" && content_lines(text) < 2) continue;
        out.push_back(std::move(text));
    }
    return out;
}

}  // namespace rules

// ---------------------------------------------------------------------------
// Registry

RuleRegistry::RuleRegistry() {
    slots_[DomainKind::StackOverflow] = Slot{{DomainKind::StackOverflow, rules::stack_overflow}, true};
    slots_[DomainKind::GitHub] = Slot{{DomainKind::GitHub, rules::github_raw}, true};
    slots_[DomainKind::GeeksForGeeks] = Slot{{DomainKind::GeeksForGeeks, rules::geeks_for_geeks}, true};
    slots_[DomainKind::Other] = Slot{{DomainKind::Other, rules::generic}, true};
}

void RuleRegistry::register_rule(ExtractionRule rule) {
    if (!rule.procedure) throw Error(ErrorCode::DuplicateRule, "rule has no procedure");
    Slot& slot = slots_[rule.domain_kind];
    if (!slot.builtin) {
        throw Error(ErrorCode::DuplicateRule,
                    "a custom rule is already registered for " + std::string(to_string(rule.domain_kind)));
    }
    slot = Slot{std::move(rule), false};
}

const ExtractionRule& RuleRegistry::rule_for(DomainKind kind) const { return slots_.at(kind).rule; }

bool RuleRegistry::is_builtin(DomainKind kind) const { return slots_.at(kind).builtin; }

ExtractionResult extract_snippets(const PageCapture& capture, DomainKind kind, Language language,
                                  const RuleRegistry& registry) {
    ExtractionResult result;
    if (capture.status != 200) return result;
    // The built-in GitHub rule only understands raw file content.
    if (kind == DomainKind::GitHub && capture.content_kind != ContentKind::RawText && registry.is_builtin(kind)) {
        return result;
    }
    std::vector<std::string> texts;
    try {
        texts = registry.rule_for(kind).procedure(capture.body);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnparseableHtml) throw;
        result.unparseable = true;
        return result;
    }
    for (auto& text : texts) {
        if (text::count_non_space(text) < kMinSnippetChars) continue;
        result.snippets.push_back(CodeSnippet{std::move(text), language, capture.url});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Fetching

namespace {

bool is_redirect(int status) {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

std::string resolve_location(const std::string& base, std::string_view location) {
    if (text::starts_with_icase(location, "http://") || text::starts_with_icase(location, "https://")) {
        return std::string(location);
    }
    const auto scheme_end = base.find("://");
    const std::string scheme = base.substr(0, scheme_end);
    if (location.substr(0, 2) == "//") return scheme + ":" + std::string(location);
    const auto path_begin = base.find('/', scheme_end + 3);
    const std::string origin = base.substr(0, path_begin);
    if (!location.empty() && location.front() == '/') return origin + std::string(location);
    std::string dir = path_begin == std::string::npos ? "/" : base.substr(path_begin);
    dir = dir.substr(0, dir.find_first_of("?#"));
    dir = dir.substr(0, dir.rfind('/') + 1);
    return origin + dir + std::string(location);
}

}  // namespace

Fetcher::Fetcher(HttpClient& http, FetchOptions options, std::shared_ptr<Clock> clock)
    : http_(http), options_(options), limiter_(options.rate_limit_rps, std::move(clock)) {}

PageCapture Fetcher::fetch(const std::string& url) {
    std::promise<Outcome> promise;
    std::shared_future<Outcome> future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(url);
        if (it == cache_.end()) {
            future = promise.get_future().share();
            cache_.emplace(url, future);
            owner = true;
        } else {
            future = it->second;
        }
    }
    if (owner) {
        Outcome outcome = fetch_uncached(url);
        if (const auto* capture = std::get_if<PageCapture>(&outcome)) {
            std::promise<Outcome> alias;
            alias.set_value(outcome);
            std::lock_guard lock(mutex_);
            cache_.try_emplace(capture->url, alias.get_future().share());
        }
        promise.set_value(std::move(outcome));
    }
    const Outcome& outcome = future.get();
    if (const auto* error = std::get_if<Error>(&outcome)) throw *error;
    return std::get<PageCapture>(outcome);
}

Fetcher::Outcome Fetcher::fetch_uncached(const std::string& url) {
    try {
        std::string current = url;
        bool raw = false;
        {
            const ParsedUrl parsed = parse_url(current);
            if (host_matches(parsed.host, "github.com")) {
                try {
                    current = github_raw_url(current);
                    raw = true;
                } catch (const Error&) {
                    // Non-blob GitHub pages are fetched as HTML.
                }
            }
        }
        for (int hop = 0;; ++hop) {
            const ParsedUrl parsed = parse_url(current);
            raw = raw || parsed.host == "raw.githubusercontent.com";

            // A previous run may already hold this hop's final page.
            if (hop > 0) {
                std::lock_guard lock(mutex_);
                auto it = cache_.find(current);
                if (it != cache_.end() &&
                    it->second.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
                    return it->second.get();
                }
            }

            limiter_.acquire(parsed.host);
            HttpRequest request;
            request.url = current;
            request.timeout = options_.timeout;
            request.headers = {{"User-Agent", std::string(kUserAgent)}};
            const HttpResponse response = http_.send(request);

            if (is_redirect(response.status)) {
                const auto location = response.header("location");
                if (!location) throw Error(ErrorCode::FetchHttpError, current + ": redirect without Location", response.status);
                if (hop >= options_.max_redirects) {
                    throw Error(ErrorCode::TooManyRedirects, url + " after " + std::to_string(hop) + " redirects");
                }
                current = resolve_location(current, *location);
                continue;
            }
            if (response.status != 200) {
                throw Error(ErrorCode::FetchHttpError, current + ": HTTP " + std::to_string(response.status),
                            response.status);
            }
            return PageCapture{current, response.status, response.body, raw ? ContentKind::RawText : ContentKind::Html};
        }
    } catch (const Error& e) {
        return e;
    }
}

}  // namespace codegenlink
