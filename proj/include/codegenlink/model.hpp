#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codegenlink {

enum class Language { Python, Java, Unknown };
enum class DomainKind { GitHub, StackOverflow, GeeksForGeeks, Other };
enum class Metric { Clone, Cosine };
enum class Combinator { Any, All };
enum class LicenseMethod { GitHubApi, LicenseFileClassifier, DomainPolicy, HtmlKeywordScan };

std::string_view to_string(Language lang) noexcept;
std::string_view to_string(DomainKind kind) noexcept;
std::string_view to_string(Metric metric) noexcept;
std::string_view to_string(Combinator combinator) noexcept;
std::string_view to_string(LicenseMethod method) noexcept;

// Case-insensitive; throw Error(ParseError) on unknown names.
Language parse_language(std::string_view text);
DomainKind parse_domain_kind(std::string_view text);
Metric parse_metric(std::string_view text);
Combinator parse_combinator(std::string_view text);
LicenseMethod parse_license_method(std::string_view text);

/// Guess from a file extension: .py -> Python, .java -> Java, else Unknown.
Language language_from_path(const std::filesystem::path& path);

/// Source code under analysis. `source_url` is empty for the query side and
/// holds the page URL for code extracted from the web.
struct CodeSnippet {
    std::string content;
    Language language = Language::Unknown;
    std::optional<std::string> source_url;

    [[nodiscard]] bool is_query() const noexcept { return !source_url.has_value(); }
    /// True when the content has at least one non-whitespace character.
    [[nodiscard]] bool admissible() const noexcept;

    bool operator==(const CodeSnippet&) const = default;
};

struct CandidateLink {
    std::string url;
    DomainKind domain_kind = DomainKind::Other;
    std::size_t rank = 0;

    bool operator==(const CandidateLink&) const = default;
};

/// Builds a link from a URL, classifying its host. Throws MalformedUrl.
CandidateLink make_link(std::string_view url, std::size_t rank);

struct SimilarityResult {
    double cloning_ratio = 0.0;
    double cosine = 0.0;

    bool operator==(const SimilarityResult&) const = default;
};

/// Sentinel id for license text that looks like a license but matches no
/// catalog entry.
inline constexpr std::string_view kNonSpdxText = "NonSpdxText";

struct LicenseFinding {
    std::string spdx_id;
    LicenseMethod method = LicenseMethod::HtmlKeywordScan;

    bool operator==(const LicenseFinding&) const = default;
};

/// 1 = most trustworthy (GitHubApi) .. 4 = least (HtmlKeywordScan).
int confidence_rank(LicenseMethod method) noexcept;

struct AnalysisConfig {
    double clone_threshold = 0.8;
    double cosine_threshold = 0.8;
    int min_clone_tokens = 10;
    std::vector<Metric> metrics_enabled{Metric::Clone, Metric::Cosine};
    Combinator combinator = Combinator::Any;
    int max_links = 20;
    int http_timeout_seconds = 15;
    double per_domain_rate_limit_rps = 1.0;

    [[nodiscard]] bool metric_enabled(Metric metric) const noexcept;
    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    bool operator==(const AnalysisConfig&) const = default;
};

/// Parses the `key = value` configuration format. Blank lines and lines
/// starting with '#' are ignored; unspecified keys keep their defaults.
AnalysisConfig parse_config(std::string_view text);
AnalysisConfig load_config(const std::filesystem::path& path);
/// Renders every field; parse_config(render_config(c)) == c.
std::string render_config(const AnalysisConfig& config);

/// One page that survived the similarity filter.
struct ProvenanceRecord {
    CandidateLink link;
    CodeSnippet best_snippet;
    SimilarityResult similarity;
    std::optional<LicenseFinding> license;

    bool operator==(const ProvenanceRecord&) const = default;
};

struct ReportStats {
    std::size_t links_retrieved = 0;
    std::size_t links_with_code = 0;
    std::size_t links_retained = 0;

    bool operator==(const ReportStats&) const = default;
};

enum class LinkOutcome { Retained, Filtered, NoCode, FetchFailed };
std::string_view to_string(LinkOutcome outcome) noexcept;
LinkOutcome parse_link_outcome(std::string_view text);

struct SnippetScore {
    double cloning_ratio = 0.0;
    double cosine = 0.0;
    /// Coverage of the web snippet by the same clone pairs. Not used for filtering.
    double reverse_cloning_ratio = 0.0;

    bool operator==(const SnippetScore&) const = default;
};

/// Per-link trace kept alongside the records for debugging.
struct LinkDiagnostic {
    std::string url;
    LinkOutcome outcome = LinkOutcome::NoCode;
    std::string message;
    std::vector<SnippetScore> snippet_scores;

    bool operator==(const LinkDiagnostic&) const = default;
};

struct ProvenanceReport {
    CodeSnippet query;
    std::vector<ProvenanceRecord> records;
    AnalysisConfig config;
    ReportStats stats;
    std::vector<LinkDiagnostic> diagnostics;

    bool operator==(const ProvenanceReport&) const = default;
};

struct ParsedUrl {
    std::string scheme;  // "http" or "https"
    std::string host;    // lowercase, no port
    std::string path;    // starts with '/'
    std::string query;   // without '?'
};

/// Splits an absolute http(s) URL. Throws MalformedUrl.
ParsedUrl parse_url(std::string_view text);

/// Exact or subdomain match against the known code-hosting domains.
DomainKind classify_domain(std::string_view host) noexcept;

/// True when `host` equals `suffix` or ends with "." + suffix.
bool host_matches(std::string_view host, std::string_view suffix) noexcept;

}  // namespace codegenlink
