#include "codegenlink/model.hpp"

#include "codegenlink/errors.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

namespace codegenlink {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedUrl: return "MalformedUrl";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::EmptyQuery: return "EmptyQuery";
        case ErrorCode::ZeroLengthQuery: return "ZeroLengthQuery";
        case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorCode::NotABlobUrl: return "NotABlobUrl";
        case ErrorCode::UnparseableHtml: return "UnparseableHtml";
        case ErrorCode::FetchTimeout: return "FetchTimeout";
        case ErrorCode::FetchHttpError: return "FetchHttpError";
        case ErrorCode::TooManyRedirects: return "TooManyRedirects";
        case ErrorCode::NetworkError: return "NetworkError";
        case ErrorCode::DuplicateRule: return "DuplicateRule";
        case ErrorCode::ApiUnavailable: return "ApiUnavailable";
        case ErrorCode::RepoNotFound: return "RepoNotFound";
        case ErrorCode::MissingLabel: return "MissingLabel";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& table,
                std::string_view what) {
    const std::string lowered = text::to_lower(text::trim(text));
    for (const auto& [name, value] : table) {
        if (text::to_lower(name) == lowered) return value;
    }
    throw Error(ErrorCode::ParseError, "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

constexpr std::array<std::pair<std::string_view, Language>, 3> kLanguages{{
    {"python", Language::Python}, {"java", Language::Java}, {"unknown", Language::Unknown}}};
constexpr std::array<std::pair<std::string_view, DomainKind>, 4> kDomainKinds{{
    {"github", DomainKind::GitHub},
    {"stackoverflow", DomainKind::StackOverflow},
    {"geeksforgeeks", DomainKind::GeeksForGeeks},
    {"other", DomainKind::Other}}};
constexpr std::array<std::pair<std::string_view, Metric>, 2> kMetrics{{
    {"clone", Metric::Clone}, {"cosine", Metric::Cosine}}};
constexpr std::array<std::pair<std::string_view, Combinator>, 2> kCombinators{{
    {"any", Combinator::Any}, {"all", Combinator::All}}};
constexpr std::array<std::pair<std::string_view, LicenseMethod>, 4> kMethods{{
    {"GitHubApi", LicenseMethod::GitHubApi},
    {"LicenseFileClassifier", LicenseMethod::LicenseFileClassifier},
    {"DomainPolicy", LicenseMethod::DomainPolicy},
    {"HtmlKeywordScan", LicenseMethod::HtmlKeywordScan}}};
constexpr std::array<std::pair<std::string_view, LinkOutcome>, 4> kOutcomes{{
    {"retained", LinkOutcome::Retained},
    {"filtered", LinkOutcome::Filtered},
    {"no_code", LinkOutcome::NoCode},
    {"fetch_failed", LinkOutcome::FetchFailed}}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& table) noexcept {
    for (const auto& [name, v] : table) {
        if (v == value) return name;
    }
    return "?";
}

// Host registry for domain classification. githubusercontent.com serves raw
// GitHub file content and is treated as GitHub.
constexpr std::array<std::pair<std::string_view, DomainKind>, 4> kDomainRegistry{{
    {"github.com", DomainKind::GitHub},
    {"githubusercontent.com", DomainKind::GitHub},
    {"stackoverflow.com", DomainKind::StackOverflow},
    {"geeksforgeeks.org", DomainKind::GeeksForGeeks}}};

}  // namespace

std::string_view to_string(Language lang) noexcept {
    switch (lang) {
        case Language::Python: return "Python";
        case Language::Java: return "Java";
        case Language::Unknown: return "Unknown";
    }
    return "Unknown";
}
std::string_view to_string(DomainKind kind) noexcept {
    switch (kind) {
        case DomainKind::GitHub: return "GitHub";
        case DomainKind::StackOverflow: return "StackOverflow";
        case DomainKind::GeeksForGeeks: return "GeeksForGeeks";
        case DomainKind::Other: return "Other";
    }
    return "Other";
}
std::string_view to_string(Metric metric) noexcept { return name_of(metric, kMetrics); }
std::string_view to_string(Combinator combinator) noexcept { return name_of(combinator, kCombinators); }
std::string_view to_string(LicenseMethod method) noexcept { return name_of(method, kMethods); }
std::string_view to_string(LinkOutcome outcome) noexcept { return name_of(outcome, kOutcomes); }

Language parse_language(std::string_view text) { return parse_enum(text, kLanguages, "language"); }
DomainKind parse_domain_kind(std::string_view text) { return parse_enum(text, kDomainKinds, "domain kind"); }
Metric parse_metric(std::string_view text) { return parse_enum(text, kMetrics, "metric"); }
Combinator parse_combinator(std::string_view text) { return parse_enum(text, kCombinators, "combinator"); }
LicenseMethod parse_license_method(std::string_view text) { return parse_enum(text, kMethods, "license method"); }
LinkOutcome parse_link_outcome(std::string_view text) { return parse_enum(text, kOutcomes, "link outcome"); }

Language language_from_path(const std::filesystem::path& path) {
    const std::string ext = text::to_lower(path.extension().string());
    if (ext == ".py" || ext == ".pyw") return Language::Python;
    if (ext == ".java") return Language::Java;
    return Language::Unknown;
}

bool CodeSnippet::admissible() const noexcept {
    return std::any_of(content.begin(), content.end(), [](unsigned char c) { return !text::is_space(c); });
}

int confidence_rank(LicenseMethod method) noexcept {
    switch (method) {
        case LicenseMethod::GitHubApi: return 1;
        case LicenseMethod::LicenseFileClassifier: return 2;
        case LicenseMethod::DomainPolicy: return 3;
        case LicenseMethod::HtmlKeywordScan: return 4;
    }
    return 4;
}

// ---------------------------------------------------------------------------
// URLs

ParsedUrl parse_url(std::string_view text) {
    const auto fail = [&](const char* why) {
        return Error(ErrorCode::MalformedUrl, std::string(why) + ": '" + std::string(text) + "'");
    };
    const auto sep = text.find("://");
    if (sep == std::string_view::npos || sep == 0) throw fail("not an absolute URL");

    ParsedUrl out;
    out.scheme = text::to_lower(text.substr(0, sep));
    if (out.scheme != "http" && out.scheme != "https") throw fail("unsupported scheme");

    std::string_view rest = text.substr(sep + 3);
    if (std::any_of(rest.begin(), rest.end(), [](unsigned char c) { return c <= 0x20 || c == 0x7f; })) {
        throw fail("whitespace or control character in URL");
    }
    const auto authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    std::string_view tail = authority_end == std::string_view::npos ? std::string_view{} : rest.substr(authority_end);

    if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
    std::string_view host = authority;
    std::string_view port;
    if (!host.empty() && host.front() == '[') {
        const auto close = host.find(']');
        if (close == std::string_view::npos) throw fail("unterminated IPv6 literal");
        port = host.substr(close + 1);
        host = host.substr(0, close + 1);
        if (!port.empty() && port.front() != ':') throw fail("garbage after IPv6 literal");
    } else if (const auto colon = host.find(':'); colon != std::string_view::npos) {
        port = host.substr(colon);
        host = host.substr(0, colon);
    }
    if (!port.empty()) {
        port.remove_prefix(1);
        if (!port.empty() && !std::all_of(port.begin(), port.end(), [](unsigned char c) { return text::is_digit(c); })) {
            throw fail("invalid port");
        }
    }
    if (host.empty()) throw fail("empty host");
    for (unsigned char c : host) {
        if (!(text::is_alnum(c) || c == '-' || c == '.' || c == '_' || c == '[' || c == ']' || c == ':' || c >= 0x80)) {
            throw fail("invalid host character");
        }
    }
    out.host = text::to_lower(host);
    while (!out.host.empty() && out.host.back() == '.') out.host.pop_back();
    if (out.host.empty()) throw fail("empty host");

    const auto fragment = tail.find('#');
    if (fragment != std::string_view::npos) tail = tail.substr(0, fragment);
    const auto q = tail.find('?');
    std::string_view path = tail.substr(0, q);
    if (q != std::string_view::npos) out.query = std::string(tail.substr(q + 1));
    out.path = path.empty() ? "/" : std::string(path);
    return out;
}

bool host_matches(std::string_view host, std::string_view suffix) noexcept {
    if (host.size() < suffix.size()) return false;
    if (host.substr(host.size() - suffix.size()) != suffix) return false;
    return host.size() == suffix.size() || host[host.size() - suffix.size() - 1] == '.';
}

DomainKind classify_domain(std::string_view host) noexcept {
    for (const auto& [suffix, kind] : kDomainRegistry) {
        if (host_matches(host, suffix)) return kind;
    }
    return DomainKind::Other;
}

CandidateLink make_link(std::string_view url, std::size_t rank) {
    const ParsedUrl parsed = parse_url(url);
    return CandidateLink{std::string(url), classify_domain(parsed.host), rank};
}

// ---------------------------------------------------------------------------
// Configuration

bool AnalysisConfig::metric_enabled(Metric metric) const noexcept {
    return std::find(metrics_enabled.begin(), metrics_enabled.end(), metric) != metrics_enabled.end();
}

void AnalysisConfig::validate() const {
    const auto fail = [](const std::string& msg) { return Error(ErrorCode::ConfigError, msg); };
    if (!(clone_threshold >= 0.0 && clone_threshold <= 1.0)) throw fail("clone_threshold must be in [0,1]");
    if (!(cosine_threshold >= 0.0 && cosine_threshold <= 1.0)) throw fail("cosine_threshold must be in [0,1]");
    if (min_clone_tokens < 2) throw fail("min_clone_tokens must be >= 2");
    if (metrics_enabled.empty()) throw fail("metrics_enabled must not be empty");
    if (max_links < 1) throw fail("max_links must be >= 1");
    if (http_timeout_seconds < 1) throw fail("http_timeout_seconds must be >= 1");
    if (!(per_domain_rate_limit_rps >= 0.0)) throw fail("per_domain_rate_limit_rps must be >= 0");
}

namespace {

double parse_double(std::string_view key, std::string_view value) {
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::ConfigError, std::string(key) + ": expected a number, got '" + std::string(value) + "'");
    }
    return out;
}

int parse_int(std::string_view key, std::string_view value) {
    int out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw Error(ErrorCode::ConfigError, std::string(key) + ": expected an integer, got '" + std::string(value) + "'");
    }
    return out;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

}  // namespace

AnalysisConfig parse_config(std::string_view text) {
    AnalysisConfig config;
    std::size_t line_no = 0;
    for (std::string_view raw : text::split_lines(text)) {
        ++line_no;
        const std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string_view key = text::trim(line.substr(0, eq));
        const std::string_view value = text::trim(line.substr(eq + 1));
        try {
            if (key == "clone_threshold") {
                config.clone_threshold = parse_double(key, value);
            } else if (key == "cosine_threshold") {
                config.cosine_threshold = parse_double(key, value);
            } else if (key == "min_clone_tokens") {
                config.min_clone_tokens = parse_int(key, value);
            } else if (key == "metrics_enabled") {
                config.metrics_enabled.clear();
                for (std::string_view item : text::split(value, ',')) {
                    item = text::trim(item);
                    if (item.empty()) continue;
                    if (text::to_lower(item) == "both") {
                        config.metrics_enabled = {Metric::Clone, Metric::Cosine};
                        continue;
                    }
                    const Metric m = parse_metric(item);
                    if (!config.metric_enabled(m)) config.metrics_enabled.push_back(m);
                }
            } else if (key == "combinator") {
                config.combinator = parse_combinator(value);
            } else if (key == "max_links") {
                config.max_links = parse_int(key, value);
            } else if (key == "http_timeout_seconds") {
                config.http_timeout_seconds = parse_int(key, value);
            } else if (key == "per_domain_rate_limit_rps") {
                config.per_domain_rate_limit_rps = parse_double(key, value);
            } else {
                throw Error(ErrorCode::ConfigError, "unknown key '" + std::string(key) + "'");
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError) throw;
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

AnalysisConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string render_config(const AnalysisConfig& config) {
    std::ostringstream out;
    out << "clone_threshold = " << format_double(config.clone_threshold) << '\n';
    out << "cosine_threshold = " << format_double(config.cosine_threshold) << '\n';
    out << "min_clone_tokens = " << config.min_clone_tokens << '\n';
    out << "metrics_enabled = ";
    for (std::size_t i = 0; i < config.metrics_enabled.size(); ++i) {
        if (i) out << ',';
        out << to_string(config.metrics_enabled[i]);
    }
    out << '\n';
    out << "combinator = " << to_string(config.combinator) << '\n';
    out << "max_links = " << config.max_links << '\n';
    out << "http_timeout_seconds = " << config.http_timeout_seconds << '\n';
    out << "per_domain_rate_limit_rps = " << format_double(config.per_domain_rate_limit_rps) << '\n';
    return out.str();
}

}  // namespace codegenlink
