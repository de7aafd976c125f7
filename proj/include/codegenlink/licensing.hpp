#pragma once

#include "codegenlink/extraction.hpp"
#include "codegenlink/http.hpp"
#include "codegenlink/model.hpp"

#include <chrono>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace codegenlink {

/// Lowercases, turns every character other than [a-z0-9.+-] into a space
/// and collapses runs of spaces. Phrase matching runs on this form.
std::string normalize_license_text(std::string_view text);

struct SpdxEntry {
    std::string id;
    std::vector<std::string> names;  // normalized phrases
};

/// SPDX identifiers with matchable license-name phrases.
class SpdxCatalog {
public:
    /// The catalog compiled into the library.
    static const SpdxCatalog& bundled();
    /// Parses `id<TAB>phrase|phrase...` lines; '#' starts a comment line.
    static SpdxCatalog parse(std::string_view tsv);

    [[nodiscard]] const std::vector<SpdxEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] bool contains(std::string_view id) const;

    struct PhraseMatch {
        std::string spdx_id;
        std::string phrase;
        std::size_t position = 0;  // first occurrence in the normalized text
    };
    /// Every catalog phrase occurring in `normalized` on word boundaries.
    [[nodiscard]] std::vector<PhraseMatch> find_phrases(std::string_view normalized) const;

private:
    std::vector<SpdxEntry> entries_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Maps deprecated SPDX ids still returned by some services (e.g. "GPL-2.0")
/// to their current form; other ids pass through.
std::string canonical_spdx_id(std::string_view id);

struct CanonicalLicense {
    std::string_view spdx_id;
    std::string_view text;
};

/// Reference bodies for the fingerprint pass.
std::span<const CanonicalLicense> canonical_licenses();

std::set<std::string> license_token_set(std::string_view text);
double token_set_jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

inline constexpr double kFingerprintThreshold = 0.75;
inline constexpr std::size_t kNonSpdxMinChars = 200;

struct FingerprintMatch {
    std::string spdx_id;
    double jaccard = 0.0;
};

/// Canonical body with the highest token-set Jaccard against `text`,
/// regardless of threshold. Ties go to the earlier body in canonical order.
FingerprintMatch best_fingerprint_match(std::string_view text);

/// Phrase pass (earliest phrase wins, then longest), then fingerprint pass
/// (best Jaccard >= 0.75 against the canonical bodies), then NonSpdxText for
/// long texts that mention a license or copyright.
std::optional<LicenseFinding> classify_license_text(std::string_view text);

/// Host-suffix -> SPDX id for sites whose terms license all hosted code.
class DomainPolicyTable {
public:
    DomainPolicyTable() = default;
    static const DomainPolicyTable& defaults();

    void add(std::string host_suffix, std::string spdx_id);
    [[nodiscard]] std::optional<std::string> lookup(std::string_view host) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::optional<LicenseFinding> domain_policy_license(std::string_view host,
                                                    const DomainPolicyTable& table = DomainPolicyTable::defaults());

/// Longest catalog phrase in decoded page text; ties go to the earliest.
std::optional<LicenseFinding> scan_html_for_spdx(std::string_view page_text);

/// Visible text of an HTML page (entities decoded, script/style dropped).
std::string visible_page_text(std::string_view html);

struct GitHubRepo {
    std::string owner;
    std::string repo;
};

/// Owner and repository from github.com or raw.githubusercontent.com URLs.
std::optional<GitHubRepo> github_repo_from_url(std::string_view url);

/// Names tried in this order when looking for a root license file.
inline constexpr std::string_view kLicenseFileNames[] = {"LICENSE", "LICENSE.md", "LICENSE.txt",
                                                         "LICENCE", "COPYING",    "COPYING.md"};

class GitHubClient {
public:
    struct Options {
        std::string api_base = "https://api.github.com";
        std::string token;  // optional, raises the API quota
        std::chrono::seconds timeout{15};
    };

    GitHubClient(HttpClient& http, RateLimiter& limiter, Options options);

    /// Throws ApiUnavailable or RepoNotFound.
    std::optional<LicenseFinding> license_via_api(const std::string& owner, const std::string& repo);
    /// Decoded content of the preferred root license file. Throws ApiUnavailable or RepoNotFound.
    std::optional<std::string> find_license_file(const std::string& owner, const std::string& repo);

private:
    HttpResponse get(const std::string& path);

    HttpClient& http_;
    RateLimiter& limiter_;
    Options options_;
};

/// The license cascade: GitHub API then license-file classification for
/// GitHub links; domain policy then page keyword scan for all others.
class LicenseIdentifier {
public:
    explicit LicenseIdentifier(GitHubClient* github, const DomainPolicyTable& policies = DomainPolicyTable::defaults());

    std::optional<LicenseFinding> identify(const CandidateLink& link, const PageCapture* capture);

private:
    GitHubClient* github_;
    const DomainPolicyTable& policies_;
};

}  // namespace codegenlink
